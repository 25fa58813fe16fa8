#include "oulab/config.hpp"
#include "oulab/runner.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <random>

using namespace oulab;

TEST_SUITE("config")
{
    TEST_CASE("parse a commented config file")
    {
        auto const c = parse_config(R"(
# prop 2.1 run
command = verify-prop21
seed = 42     # mandatory
n = 1000
M = 512
workers = 3
b = weighted:tanh
lambda = 0.25
)");
        CHECK(c.command == Command::verify_prop21);
        CHECK(c.seed == 42u);
        CHECK(c.n_paths == 1000);
        CHECK(c.steps == 512);
        CHECK(c.workers == 3);
        CHECK(c.b == "weighted:tanh");
        CHECK(c.lambda == 0.25);
    }

    TEST_CASE("round trip: serialize(parse(text)) == normalize(text) and parse(serialize(c)) == c")
    {
        std::string const text = "command=concentration\nseed=7\nspectrum = list: 1, 4\nr=0.25\nu=0.75\neta=0.5,1,2,4\nh2=zero\n";
        auto const c = parse_config(text);
        CHECK(c.serialize() == normalize(text));
        CHECK(parse_config(c.serialize()) == c);
        CHECK(normalize(normalize(text)) == normalize(text));
        CHECK(c.spectrum == "list:1,4");
    }

    TEST_CASE("property: random configs survive a round trip")
    {
        std::mt19937_64 gen(1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int i = 0; i < 300; ++i) {
            RunConfig c;
            c.command = static_cast<Command>(gen() % 6);
            c.seed = gen();
            c.n_paths = 2 + gen() % 100000;
            c.steps = 2 + gen() % 5000;
            c.workers = 1 + gen() % 16;
            c.lambda = std::exp(8.0 * unit(gen) - 4.0);
            c.ell = 0.01 + 0.99 * unit(gen);
            c.r = 0.5 * unit(gen);
            c.u = c.r + (1.0 - c.r) * (0.01 + 0.99 * unit(gen));
            c.etas = {unit(gen), 3.0 * unit(gen)};
            c.x = {unit(gen) - 0.5, 1.0 / 3.0};
            c.format = gen() % 2 ? OutputFormat::csv : OutputFormat::json;
            CHECK(parse_config(c.serialize()) == c);
        }
    }

    TEST_CASE("invalid configs are diagnosed")
    {
        CHECK_THROWS_AS(parse_config("seed = -1"), ConfigError);
        CHECK_THROWS_AS(parse_config("n = 0"), ConfigError);
        CHECK_THROWS_AS(parse_config("bogus = 1"), ConfigError);
        CHECK_THROWS_AS(parse_config("just text"), ConfigError);
        CHECK_THROWS_AS(parse_config("command = fly"), ConfigError);
        CHECK_THROWS_AS(parse_config("spectrum = n^0.5,N=4"), ConfigError);
        CHECK_THROWS_AS(parse_config("spectrum = list:1,-4"), ConfigError);
        CHECK_THROWS_AS(parse_config("lambda-grid = log:1:0.1:5"), ConfigError);
        CHECK_THROWS_AS(parse_config("format = xml"), ConfigError);
        CHECK_THROWS_AS(validate(parse_config("command = constants")), ConfigError);
        CHECK_THROWS_AS(validate(parse_config("seed = 1\nr = 0.8\nu = 0.2")), ConfigError);
        CHECK_THROWS_AS(validate(parse_config("seed = 1\nell = 2")), ConfigError);
        CHECK_THROWS_AS(validate(parse_config("seed = 1\nspectrum = list:1,4\ntruncation = 3")), ConfigError);
        CHECK_NOTHROW(validate(parse_config("seed = 1")));
    }

    TEST_CASE("spectrum and grid syntax")
    {
        auto const family = parse_spectrum("n^2, N=16");
        CHECK(family.size() == 16);
        CHECK(family[15] == 256.0);
        CHECK(family.tail_mode() == DriftSpectrum::TailMode::unbounded_declared);
        auto const list = parse_spectrum("list:1,4");
        CHECK(list.size() == 2);
        CHECK(list.tail_mode() == DriftSpectrum::TailMode::finite);

        auto const grid = parse_lambda_grid("log:1e-3:1e2:200");
        CHECK(grid.size() == 200);
        CHECK(grid.front() == 1e-3);
        CHECK(grid.back() == 1e2);
        CHECK(grid[100] / grid[99] == doctest::Approx(grid[1] / grid[0]));
        CHECK(parse_lambda_grid("lin:1:2:3") == std::vector<double>{1.0, 1.5, 2.0});
        CHECK(parse_lambda_grid("list:0.5,1") == std::vector<double>{0.5, 1.0});
    }

    TEST_CASE("spec hash ignores workers and output locations only")
    {
        auto a = parse_config("seed = 1\nworkers = 1\noutput = a.json");
        auto b = parse_config("seed = 1\nworkers = 8\noutput = b.json");
        CHECK(spec_hash(a) == spec_hash(b));
        b.seed = 2;
        CHECK(spec_hash(a) != spec_hash(b));
    }

    TEST_CASE("run: missing seed exits 2, bad names exit 2")
    {
        CHECK(run(parse_config("command = constants")).exit_code == kExitInvalid);
        auto bad = parse_config("command = verify-prop21\nseed = 1\nb = weighted:nope\nn = 10\nM = 8");
        auto const r = run(bad);
        CHECK(r.exit_code == kExitInvalid);
        CHECK(r.diagnostics.find("nope") != std::string::npos);
    }

    TEST_CASE("run: constants CSV has the documented columns")
    {
        auto c = parse_config("command = constants\nseed = 1\nformat = csv\nlambda-grid = list:0.5,1");
        auto const r = run(c);
        CHECK(r.exit_code == kExitPass);
        CHECK(r.payload.rfind("lambda,d_lambda,alpha1,alpha2,alpha3,alpha,h,reference\n", 0) == 0);
        CHECK(std::count(r.payload.begin(), r.payload.end(), '\n') == 3);
    }

    TEST_CASE("run: JSON payload is schema 1 and identical across worker counts")
    {
        for (auto const* command : {"verify-prop21", "verify-thm23", "concentration", "moments", "decomposition"}) {
            INFO(command);
            std::string const base = std::string("command = ") + command
                                     + "\nseed = 3\nn = 300\nM = 64\nspectrum = list:1,4\ngrids = 16,64\n";
            auto const one = run(parse_config(base + "workers = 1\n"));
            auto const four = run(parse_config(base + "workers = 4\n"));
            REQUIRE(one.exit_code == kExitPass);
            CHECK(one.payload == four.payload);
            auto const json = nlohmann::json::parse(one.payload);
            CHECK(json["schema"] == 1);
            CHECK(json["seed"] == 3);
            CHECK(json.contains("spec_hash"));
            CHECK_FALSE(json.contains("timing"));
            CHECK(nlohmann::json::parse(one.document).contains("timing"));
            CHECK_FALSE(one.verdicts.empty());
        }
    }

    TEST_CASE("run: verify-prop21 JSON fields")
    {
        auto const r = run(parse_config("command = verify-prop21\nseed = 42\nn = 500\nM = 128\nlambda = 1"));
        auto const json = nlohmann::json::parse(r.payload);
        auto const& result = json["result"];
        for (auto key : {"seed", "n", "mean", "stderr", "upper999", "bound", "pass", "reference"}) {
            CHECK(result.contains(key));
        }
        CHECK(result["bound"] == 3.0);
        CHECK(result["pass"] == true);
    }
}
