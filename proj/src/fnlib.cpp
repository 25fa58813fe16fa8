#include "oulab/fnlib.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

namespace oulab {

std::string_view to_string(FunctionKind kind) noexcept
{
    switch (kind) {
    case FunctionKind::smooth:
        return "smooth";
    case FunctionKind::lipschitz:
        return "lipschitz";
    case FunctionKind::discontinuous:
        return "discontinuous";
    }
    return "unknown";
}

namespace {

double zero_value(double, double) { return 0.0; }
double one_value(double, double) { return 1.0; }
double sin_value(double, double s) { return std::sin(s); }
double sin_slope(double, double s) { return std::cos(s); }
double tanh_value(double, double s) { return std::tanh(s); }
double tanh_slope(double, double s)
{
    double const c = std::cosh(s);
    return 1.0 / (c * c);
}
double cos_time_value(double t, double) { return std::cos(2.0 * std::numbers::pi * t); }
double clip_value(double, double s) { return std::clamp(s, -1.0, 1.0); }
double sign_value(double, double s) { return static_cast<double>((s > 0.0) - (s < 0.0)); }
double step_value(double, double s) { return s > 0.0 ? 1.0 : 0.0; }

double shift_profile(std::string_view profile, double t)
{
    if (profile == "const") {
        return 1.0;
    }
    if (profile == "sin_pi_t") {
        return std::sin(std::numbers::pi * t);
    }
    if (profile == "cos_pi_t") {
        return std::cos(std::numbers::pi * t);
    }
    if (profile == "t") {
        return t;
    }
    throw DomainError("unknown shift profile '" + std::string(profile) + "'");
}

double parse_double(std::string_view text)
{
    double value = 0.0;
    auto const [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw DomainError("cannot parse number '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

ScalarProfile ScalarProfile::named(std::string_view name)
{
    ScalarProfile p;
    p.name = std::string(name);
    if (name == "zero") {
        p.sup_abs = 0.0;
        p.value = zero_value;
        p.ds = zero_value;
    } else if (name == "one") {
        p.value = one_value;
        p.ds = zero_value;
    } else if (name == "sin") {
        p.value = sin_value;
        p.ds = sin_slope;
    } else if (name == "tanh") {
        p.value = tanh_value;
        p.ds = tanh_slope;
    } else if (name == "cos_2pi_t") {
        p.value = cos_time_value;
        p.ds = zero_value;
    } else if (name == "clip") {
        p.kind = FunctionKind::lipschitz;
        p.value = clip_value;
    } else if (name == "sign") {
        p.kind = FunctionKind::discontinuous;
        p.value = sign_value;
    } else if (name == "step") {
        p.kind = FunctionKind::discontinuous;
        p.value = step_value;
    } else {
        throw DomainError("unknown profile '" + std::string(name) + "'");
    }
    return p;
}

double FunctionDescriptor::project(std::span<double const> x) const
{
    if (x.size() != direction_.size()) {
        throw DomainError("argument dimension does not match descriptor input dimension");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += direction_[i] * x[i];
    }
    return space_scale_ * s;
}

double FunctionDescriptor::profile_value_projected(double t, double projected) const
{
    return profile_.value(time_shift_ + time_scale_ * t, projected);
}

double FunctionDescriptor::profile_slope_projected(double t, double projected) const
{
    if (!profile_.ds) {
        throw DomainError("descriptor '" + formula_ + "' has no derivative");
    }
    return profile_.ds(time_shift_ + time_scale_ * t, projected);
}

double FunctionDescriptor::profile_value(double t, std::span<double const> x) const
{
    return profile_value_projected(t, project(x));
}

void FunctionDescriptor::evaluate(double t, std::span<double const> x, std::span<double> out) const
{
    double const v = profile_value(t, x);
    for (std::size_t n = 0; n < weights_.size(); ++n) {
        out[n] = weights_[n] * v;
    }
}

std::vector<double> FunctionDescriptor::evaluate(double t, std::span<double const> x) const
{
    std::vector<double> out(weights_.size());
    evaluate(t, x, out);
    return out;
}

void FunctionDescriptor::apply_derivative(double t, std::span<double const> x, std::span<double const> v,
                                          std::span<double> out) const
{
    // d/dx w phi(tau, sigma <d, x>) v = w phi_s sigma <d, v>
    double const slope = profile_slope_projected(t, project(x));
    double const dv = project(v);
    for (std::size_t n = 0; n < weights_.size(); ++n) {
        out[n] = weights_[n] * slope * dv;
    }
}

FunctionDescriptor FunctionDescriptor::rescaled(double scale, double shift) const
{
    if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(shift)) {
        throw DomainError("rescaling needs a positive finite scale");
    }
    FunctionDescriptor out = *this;
    out.time_shift_ = time_shift_ + time_scale_ * shift;
    out.time_scale_ = time_scale_ * scale;
    out.space_scale_ = space_scale_ * std::sqrt(scale);
    out.formula_ = formula_ + " rescaled(" + std::to_string(scale) + "," + std::to_string(shift) + ")";
    return out;
}

double FunctionDescriptor::h_norm(std::span<double const> value)
{
    return std::sqrt(std::inner_product(value.begin(), value.end(), value.begin(), 0.0));
}

double FunctionDescriptor::a_norm(std::span<double const> eigenvalues, std::span<double const> value)
{
    double sum = 0.0;
    for (std::size_t n = 0; n < value.size(); ++n) {
        if (value[n] == 0.0) {
            continue;
        }
        // lambda e^{2 lambda} b^2 in log space, since e^{2 lambda} overflows before b underflows
        double const log_term = std::log(eigenvalues[n]) + 2.0 * eigenvalues[n] + 2.0 * std::log(std::fabs(value[n]));
        sum += std::exp(log_term);
    }
    return std::sqrt(sum);
}

FunctionDescriptor make_b_weighted(DriftSpectrum const& spectrum, ScalarProfile profile,
                                   std::span<double const> coefficients, std::span<double const> direction)
{
    std::size_t const dim = spectrum.size();
    if (dim == 0) {
        throw DomainError("make_b_weighted: empty spectrum");
    }
    if (coefficients.size() != dim) {
        throw DomainError("make_b_weighted: need one coefficient per eigenvalue");
    }
    if (!profile.value || !(profile.sup_abs >= 0.0 && profile.sup_abs <= 1.0)) {
        throw DomainError("make_b_weighted: profile must satisfy |phi| <= 1");
    }
    double const c_sq = std::inner_product(coefficients.begin(), coefficients.end(), coefficients.begin(), 0.0);
    if (!(c_sq <= 1.0 + 1e-12)) {
        throw DomainError("make_b_weighted: sum c_n^2 = " + std::to_string(c_sq) + " exceeds 1");
    }

    FunctionDescriptor b;
    if (direction.empty()) {
        b.direction_.assign(dim, 0.0);
        b.direction_[0] = 1.0;
    } else {
        if (direction.size() != dim) {
            throw DomainError("make_b_weighted: direction dimension mismatch");
        }
        b.direction_.assign(direction.begin(), direction.end());
    }

    b.weights_.resize(dim);
    double raw_sq = 0.0;
    for (std::size_t n = 0; n < dim; ++n) {
        double const lambda = spectrum[n];
        b.weights_[n] = coefficients[n] * std::exp(-lambda) / std::sqrt(lambda);
        raw_sq += b.weights_[n] * b.weights_[n];
    }
    double const raw_inf = std::sqrt(raw_sq);
    double const scale = raw_inf > 1.0 ? 1.0 / raw_inf : 1.0;
    for (double& w : b.weights_) {
        w *= scale;
    }

    b.norm_inf_ = scale * raw_inf * profile.sup_abs;
    b.norm_inf_a_ = std::min(1.0, scale * std::sqrt(c_sq)) * profile.sup_abs;
    b.formula_ = "weighted:" + profile.name;
    if (scale != 1.0) {
        b.formula_ += " (scaled by " + std::to_string(scale) + ")";
    }
    b.profile_ = std::move(profile);
    return b;
}

FunctionDescriptor make_b_named(std::string_view name, DriftSpectrum const& spectrum)
{
    std::size_t const dim = spectrum.size();
    if (dim == 0) {
        throw DomainError("make_b_named: empty spectrum");
    }
    std::vector<double> c(dim, 0.0);
    c[0] = 1.0;
    std::vector<double> uniform(dim, 1.0 / std::sqrt(static_cast<double>(dim)));

    std::string_view profile;
    if (name.starts_with("weighted:")) {
        profile = name.substr(9);
    } else if (name == "const") {
        profile = "one";
    } else if (name == "zero") {
        profile = "zero";
    } else if (name == "time:cos") {
        profile = "cos_2pi_t";
    } else {
        throw DomainError("unknown function name '" + std::string(name) + "'");
    }
    auto b = make_b_weighted(spectrum, ScalarProfile::named(profile), c, uniform);
    b.formula_ = std::string(name);
    return b;
}

ShiftDescriptor ShiftDescriptor::zero(std::size_t dim)
{
    ShiftDescriptor h;
    h.eigenvalues_.assign(dim, 1.0);
    h.formula_ = "zero";
    return h;
}

void ShiftDescriptor::evaluate(double t, std::span<double> out) const
{
    std::fill(out.begin(), out.end(), 0.0);
    for (auto const& term : terms_) {
        out[term.component] += term.amplitude * shift_profile(term.profile, t);
    }
}

std::vector<double> ShiftDescriptor::evaluate(double t) const
{
    std::vector<double> out(dim());
    evaluate(t, out);
    return out;
}

double ShiftDescriptor::a_norm_sq(double t) const
{
    auto const h = evaluate(t);
    double sum = 0.0;
    for (std::size_t n = 0; n < h.size(); ++n) {
        sum += h[n] * h[n] * eigenvalues_[n] * eigenvalues_[n];
    }
    return sum;
}

ShiftDescriptor make_h(DriftSpectrum const& spectrum, std::vector<ShiftDescriptor::Term> terms)
{
    ShiftDescriptor h;
    h.eigenvalues_.assign(spectrum.eigenvalues().begin(), spectrum.eigenvalues().end());
    for (auto const& term : terms) {
        if (term.component >= spectrum.size()) {
            throw DomainError("shift component e" + std::to_string(term.component + 1) + " outside the spectrum");
        }
        if (!std::isfinite(term.amplitude)) {
            throw DomainError("shift amplitude must be finite");
        }
        shift_profile(term.profile, 0.0);  // validates the name
        if (!h.formula_.empty()) {
            h.formula_ += "+";
        }
        h.formula_ += "e" + std::to_string(term.component + 1) + ":" + term.profile;
        if (term.amplitude != 1.0) {
            h.formula_ += "*" + std::to_string(term.amplitude);
        }
    }
    h.terms_ = std::move(terms);

    std::vector<double> value(h.dim());
    for (std::size_t k = 0; k <= ShiftDescriptor::kGridIntervals; ++k) {
        double const t = static_cast<double>(k) / static_cast<double>(ShiftDescriptor::kGridIntervals);
        h.evaluate(t, value);
        h.norm_inf_ = std::max(h.norm_inf_, FunctionDescriptor::h_norm(value));
    }
    if (!(h.norm_inf_ > 0.0)) {
        throw DomainError("shift is identically zero; the exponential estimate needs ||h||_inf in (0, inf)");
    }
    return h;
}

ShiftDescriptor make_h_named(std::string_view name, DriftSpectrum const& spectrum)
{
    std::vector<ShiftDescriptor::Term> terms;
    std::size_t start = 0;
    while (start <= name.size()) {
        std::size_t const end = std::min(name.find('+', start), name.size());
        std::string_view item = name.substr(start, end - start);
        std::size_t const colon = item.find(':');
        if (item.size() < 4 || item[0] != 'e' || colon == std::string_view::npos) {
            throw DomainError("shift term '" + std::string(item) + "' is not of the form e<n>:<profile>");
        }
        double const index = parse_double(item.substr(1, colon - 1));
        if (index < 1.0 || index != std::floor(index)) {
            throw DomainError("shift component index must be a positive integer");
        }
        ShiftDescriptor::Term term;
        term.component = static_cast<std::size_t>(index) - 1;
        std::string_view profile = item.substr(colon + 1);
        if (auto const star = profile.find('*'); star != std::string_view::npos) {
            term.amplitude = parse_double(profile.substr(star + 1));
            profile = profile.substr(0, star);
        }
        term.profile = std::string(profile);
        terms.push_back(std::move(term));
        start = end + 1;
    }
    return make_h(spectrum, std::move(terms));
}

double sup_distance(ShiftDescriptor const& h1, ShiftDescriptor const& h2, double lo, double hi,
                    std::size_t intervals)
{
    if (h1.dim() != h2.dim()) {
        throw DomainError("sup_distance: dimension mismatch");
    }
    std::vector<double> a(h1.dim());
    std::vector<double> b(h2.dim());
    double sup = 0.0;
    for (std::size_t k = 0; k <= intervals; ++k) {
        double const t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(intervals);
        h1.evaluate(t, a);
        h2.evaluate(t, b);
        double sq = 0.0;
        for (std::size_t n = 0; n < a.size(); ++n) {
            sq += (a[n] - b[n]) * (a[n] - b[n]);
        }
        sup = std::max(sup, std::sqrt(sq));
    }
    return sup;
}

}  // namespace oulab
