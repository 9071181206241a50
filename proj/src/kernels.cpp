#include "volterra/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "volterra/errors.hpp"

namespace volterra {

namespace {

void require_right_half_plane(cplx lambda) {
    if (!(lambda.real() > 0.0)) {
        std::ostringstream os;
        os << "Laplace transform requires Re(lambda) > 0, got " << lambda;
        throw DomainError(os.str());
    }
}

cplx log_checked(cplx lambda) {
    if (std::abs(lambda - 1.0) < 1e-14) throw DomainError("LogKernel: log(lambda) vanishes at lambda = 1");
    return std::log(lambda);
}

}  // namespace

Kernel Kernel::power(double beta, double scale) {
    if (!(beta > 0.0 && beta < 2.0)) throw DomainError("PowerKernel requires 0 < beta < 2");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("PowerKernel scale must be positive");
    return Kernel(PowerKernel{beta, scale});
}

Kernel Kernel::exponential(double xi, double s) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("ExponentialKernel requires xi > 0");
    if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("ExponentialKernel requires s >= 0");
    return Kernel(ExponentialKernel{xi, s});
}

Kernel Kernel::log() { return Kernel(LogKernel{}); }

Kernel Kernel::stieltjes(std::vector<StieltjesAtom> atoms) {
    for (const auto& a : atoms) {
        if (!(a.s >= 0.0) || !std::isfinite(a.s)) throw DomainError("Stieltjes atom position must be >= 0");
        if (!(a.weight > 0.0) || !std::isfinite(a.weight)) throw DomainError("Stieltjes atom weight must be > 0");
    }
    return Kernel(AtomicStieltjes{std::move(atoms)});
}

Kernel Kernel::shifted(const Kernel& base, double omega) {
    if (!(omega >= 0.0) || !std::isfinite(omega)) throw DomainError("shift omega must be >= 0");
    return Kernel(Shifted{std::make_shared<const Kernel>(base), omega});
}

std::string Kernel::name() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PowerKernel>)
                os << "power(beta=" << k.beta << ", scale=" << k.scale << ")";
            else if constexpr (std::is_same_v<T, ExponentialKernel>)
                os << "exponential(xi=" << k.xi << ", s=" << k.s << ")";
            else if constexpr (std::is_same_v<T, LogKernel>)
                os << "log";
            else if constexpr (std::is_same_v<T, AtomicStieltjes>)
                os << "stieltjes(" << k.atoms.size() << " atoms)";
            else
                os << "shifted(" << k.base->name() << ", omega=" << k.omega << ")";
        },
        v_);
    return os.str();
}

cplx laplace_transform(const Kernel& kernel, cplx lambda) {
    require_right_half_plane(lambda);
    return laplace_continued(kernel, lambda);
}

cplx laplace_continued(const Kernel& kernel, cplx lambda) {
    return std::visit(
        [&](const auto& k) -> cplx {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PowerKernel>) {
                return k.scale * std::pow(lambda, -k.beta);
            } else if constexpr (std::is_same_v<T, ExponentialKernel>) {
                return k.xi / (lambda + k.s);
            } else if constexpr (std::is_same_v<T, LogKernel>) {
                return 1.0 / log_checked(lambda);
            } else if constexpr (std::is_same_v<T, AtomicStieltjes>) {
                cplx sum = 0.0;
                for (const auto& a : k.atoms) sum += a.weight / (lambda + a.s);
                return sum;
            } else {
                cplx a = laplace_continued(*k.base, lambda);
                if (k.omega == 0.0) return a;
                return a / (1.0 + k.omega * a);
            }
        },
        kernel.variant());
}

cplx laplace_derivative(const Kernel& kernel, cplx lambda) {
    require_right_half_plane(lambda);
    return std::visit(
        [&](const auto& k) -> cplx {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PowerKernel>) {
                return -k.beta * k.scale * std::pow(lambda, -k.beta - 1.0);
            } else if constexpr (std::is_same_v<T, ExponentialKernel>) {
                return -k.xi / ((lambda + k.s) * (lambda + k.s));
            } else if constexpr (std::is_same_v<T, LogKernel>) {
                cplx l = log_checked(lambda);
                return -1.0 / (lambda * l * l);
            } else if constexpr (std::is_same_v<T, AtomicStieltjes>) {
                cplx sum = 0.0;
                for (const auto& a : k.atoms) sum -= a.weight / ((lambda + a.s) * (lambda + a.s));
                return sum;
            } else {
                cplx a = laplace_transform(*k.base, lambda);
                cplx da = laplace_derivative(*k.base, lambda);
                cplx d = 1.0 + k.omega * a;
                return da / (d * d);
            }
        },
        kernel.variant());
}

Kernel simplify(const Kernel& kernel) {
    const auto* sh = std::get_if<Shifted>(&kernel.variant());
    if (!sh) return kernel;
    Kernel base = simplify(*sh->base);
    if (sh->omega == 0.0) return base;
    const double w = sh->omega;
    if (const auto* e = std::get_if<ExponentialKernel>(&base.variant()))
        return Kernel::exponential(e->xi, e->s + w * e->xi);
    if (const auto* p = std::get_if<PowerKernel>(&base.variant()); p && p->beta == 1.0)
        return Kernel::exponential(p->scale, w * p->scale);
    if (const auto* st = std::get_if<AtomicStieltjes>(&base.variant()); st && st->atoms.size() == 1)
        return Kernel::exponential(st->atoms[0].weight, st->atoms[0].s + w * st->atoms[0].weight);
    return Kernel::shifted(base, w);
}

TimeDensity time_density(const Kernel& kernel) {
    Kernel k = simplify(kernel);
    return std::visit(
        [&](const auto& v) -> TimeDensity {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PowerKernel>) {
                const double c = v.scale / boost::math::tgamma(v.beta);
                return {v.beta, [c](double) { return c; }};
            } else if constexpr (std::is_same_v<T, ExponentialKernel>) {
                const double xi = v.xi, s = v.s;
                return {1.0, [xi, s](double t) { return xi * std::exp(-s * t); }};
            } else if constexpr (std::is_same_v<T, AtomicStieltjes>) {
                auto atoms = v.atoms;
                return {1.0, [atoms](double t) {
                            double sum = 0.0;
                            for (const auto& a : atoms) sum += a.weight * std::exp(-a.s * t);
                            return sum;
                        }};
            } else if constexpr (std::is_same_v<T, LogKernel>) {
                throw UnsupportedKernel("LogKernel has no closed-form time density");
            } else {
                throw UnsupportedKernel("shifted kernel " + k.name() + " has no closed-form time density");
            }
        },
        k.variant());
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> out;
    if (n <= 0) return out;
    if (n == 1) return {lo};
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) out.push_back(std::exp(a + (b - a) * i / (n - 1)));
    out.front() = lo;
    out.back() = hi;
    return out;
}

LambdaGrid default_grid(int angle_levels, int kmin, int kmax) {
    LambdaGrid g;
    for (int k = kmin; k <= kmax; ++k) {
        const double r = std::pow(10.0, k);
        for (int m = 1; m <= angle_levels; ++m) {
            const double th = std::numbers::pi / 2 * (1.0 - std::ldexp(1.0, -m));
            g.points.push_back(std::polar(r, th));
            g.points.push_back(std::polar(r, -th));
        }
    }
    return g;
}

namespace {

void sampled_note(Report& r, const LambdaGrid& grid) {
    r.notes.push_back("sampled certificate over " + std::to_string(grid.points.size()) + " grid points, not a proof");
}

bool is_log(const Kernel& k) {
    if (std::holds_alternative<LogKernel>(k.variant())) return true;
    if (const auto* s = std::get_if<Shifted>(&k.variant())) return is_log(*s->base);
    return false;
}

}  // namespace

HypothesisReport check_sectorial(const Kernel& k, double theta, const LambdaGrid& grid) {
    Report r;
    double worst = 0.0;
    cplx at = 0.0;
    for (cplx l : grid.points) {
        double a = std::abs(std::arg(laplace_transform(k, l)));
        if (a > worst) {
            worst = a;
            at = l;
        }
    }
    r.set_constant("max_angle", worst);
    r.set_constant("theta", theta);
    r.witnesses["max_angle_at"] = at;
    r.verdict = worst <= theta ? Verdict::pass : Verdict::fail;
    sampled_note(r, grid);
    if (is_log(k)) r.notes.push_back("log kernel: Re(1/log lambda) > 0 only for |lambda| > 1; verdict valid on that region");
    return r;
}

HypothesisReport check_one_regular(const Kernel& k, const LambdaGrid& grid) {
    Report r;
    double c = 0.0;
    cplx at = 0.0;
    int singular = 0;
    for (cplx l : grid.points) {
        cplx a = laplace_transform(k, l);
        if (std::abs(a) < 1e-30) {
            if (singular == 0) r.witnesses["singular_point"] = l;
            ++singular;
            continue;
        }
        double q = std::abs(l * laplace_derivative(k, l)) / std::abs(a);
        if (q > c) {
            c = q;
            at = l;
        }
    }
    r.set_constant("c", c);
    r.witnesses["sup_at"] = at;
    r.diagnostics["singular_points"] = singular;
    if (singular > 0) {
        r.notes.push_back("|a_hat| < 1e-30 at " + std::to_string(singular) + " grid points; skipped");
        r.verdict = Verdict::inconclusive;
    } else {
        r.verdict = std::isfinite(c) ? Verdict::pass : Verdict::fail;
    }
    sampled_note(r, grid);
    if (is_log(k)) r.notes.push_back("log kernel: verdict valid on |lambda| > 1 only");
    return r;
}

HypothesisReport check_growth(const Kernel& k, double beta, GrowthDirection dir, const std::vector<double>& lambdas,
                              double reference_constant) {
    Report r;
    if (lambdas.empty()) {
        r.verdict = Verdict::inconclusive;
        r.notes.push_back("empty lambda sample");
        return r;
    }
    const bool upper = dir == GrowthDirection::upper;
    double best = upper ? 0.0 : std::numeric_limits<double>::infinity();
    double at = lambdas.front();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double l : lambdas) {
        if (!(l > 0.0)) throw DomainError("growth check needs positive real lambda");
        double m = std::abs(laplace_transform(k, cplx(l, 0.0)));
        double v = m * std::pow(l, beta);
        if (upper ? v > best : v < best) {
            best = v;
            at = l;
        }
        double x = std::log(l), y = std::log(m);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(lambdas.size());
    const double den = n * sxx - sx * sx;
    r.diagnostics["loglog_slope"] = den > 0 ? (n * sxy - sx * sy) / den : 0.0;
    r.witnesses["extremum_at"] = cplx(at, 0.0);
    if (!std::isfinite(best)) {
        r.verdict = Verdict::fail;
        r.diagnostics["constant"] = best;
        return r;
    }
    r.set_constant("constant", best);
    if (reference_constant >= 0.0) {
        r.set_constant("reference", reference_constant);
        const double slack = 1e-12 * std::max(1.0, reference_constant);
        r.verdict = (upper ? best <= reference_constant + slack : best >= reference_constant - slack) ? Verdict::pass
                                                                                                        : Verdict::fail;
    } else {
        r.verdict = (upper || best > 0.0) ? Verdict::pass : Verdict::fail;
    }
    r.notes.push_back(std::string(upper ? "upper" : "lower") + " bound sampled on " + std::to_string(lambdas.size()) +
                      " real points");
    return r;
}

}  // namespace volterra
