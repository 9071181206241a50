#include "volterra/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"
#include "volterra/quadrature.hpp"
#include "volterra/resolvent.hpp"

namespace volterra {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

struct ScalarSignal::Form {
    enum Kind { exponential, frame, poly_exp, sampled, function, decaying, truncated, reflected } kind;
    cplx w = 0.0;
    std::vector<cplx> p;
    std::vector<double> grid;
    std::vector<cplx> values;
    std::function<cplx(double)> f;
    std::function<double(double)> tail;
    double support = inf;
    std::vector<double> bps;
    std::string label;
    std::shared_ptr<const ScalarSignal> base;
    double a = 0.0, b = 0.0;
};

namespace {

using Form = ScalarSignal::Form;

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// int over [a, b] of g split at the given points
template <class V, class G>
quad::Result<V> piecewise(G g, double a, double b, const std::vector<double>& cuts, double abs_tol, double rel_tol) {
    std::vector<double> pts{a};
    for (double c : cuts)
        if (c > a && c < b) pts.push_back(c);
    pts.push_back(b);
    pts = sorted_unique(pts);
    quad::Result<V> total{V{}, 0.0, 0};
    bool first = true;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto r = quad::integrate<V>(g, pts[i], pts[i + 1], abs_tol, rel_tol, 2000);
        total.value = first ? r.value : total.value + r.value;
        first = false;
        total.error += r.error;
        total.evaluations += r.evaluations;
    }
    if (first) total.value = g(a) * 0.0;
    return total;
}

cplx eval_form(const Form& f, double t) {
    if (t < 0.0) return 0.0;
    switch (f.kind) {
        case Form::exponential: return std::exp(-f.w * t);
        case Form::frame: return 2.0 * std::pow(f.w.real(), 1.5) * t * std::exp(-f.w * t);
        case Form::poly_exp: {
            cplx s = 0.0, tk = 1.0;
            for (const auto& c : f.p) {
                s += c * tk;
                tk *= t;
            }
            return s * std::exp(-f.w * t);
        }
        case Form::sampled: {
            if (t > f.grid.back()) return 0.0;
            auto it = std::upper_bound(f.grid.begin(), f.grid.end(), t);
            if (it == f.grid.end()) return f.values.back();
            const std::size_t i = static_cast<std::size_t>(it - f.grid.begin()) - 1;
            const double th = (t - f.grid[i]) / (f.grid[i + 1] - f.grid[i]);
            return (1.0 - th) * f.values[i] + th * f.values[i + 1];
        }
        case Form::function: return t <= f.support ? f.f(t) : cplx(0.0);
        case Form::decaying: return f.f(t);
        case Form::truncated: return (t >= f.a && t <= f.b) ? (*f.base)(t) : cplx(0.0);
        default: return t <= f.b ? (*f.base)(f.b - t) : cplx(0.0);
    }
}

}  // namespace

ScalarSignal::ScalarSignal(std::shared_ptr<const Form> f, cplx scale, double norm)
    : form_(std::move(f)), scale_(scale), norm_(norm) {}

cplx ScalarSignal::operator()(double t) const { return scale_ * eval_form(*form_, t); }

ScalarSignal ScalarSignal::exponential(cplx w) {
    if (!(w.real() > 0.0)) throw DomainError("exponential input needs Re w > 0");
    auto f = std::make_shared<Form>();
    f->kind = Form::exponential;
    f->w = w;
    return ScalarSignal(f, 1.0, 1.0 / std::sqrt(2.0 * w.real()));
}

ScalarSignal ScalarSignal::frame(cplx lambda) {
    if (!(lambda.real() > 0.0)) throw DomainError("frame function needs Re lambda > 0");
    auto f = std::make_shared<Form>();
    f->kind = Form::frame;
    f->w = lambda;
    return ScalarSignal(f, 1.0, 1.0);
}

ScalarSignal ScalarSignal::poly_exp(std::vector<cplx> p, cplx w) {
    if (!(w.real() > 0.0)) throw DomainError("polynomial-exponential input needs Re w > 0");
    const double a2 = 2.0 * w.real();
    double n2 = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
        for (std::size_t l = 0; l < p.size(); ++l)
            n2 += (p[k] * std::conj(p[l])).real() * boost::math::factorial<double>(static_cast<unsigned>(k + l)) /
                  std::pow(a2, static_cast<double>(k + l + 1));
    auto f = std::make_shared<Form>();
    f->kind = Form::poly_exp;
    f->p = std::move(p);
    f->w = w;
    return ScalarSignal(f, 1.0, std::sqrt(std::max(n2, 0.0)));
}

ScalarSignal ScalarSignal::sampled(std::vector<double> grid, std::vector<cplx> values) {
    if (grid.size() < 2 || grid.size() != values.size()) throw DomainError("sampled input needs matching grid and values");
    if (grid[0] != 0.0) throw DomainError("sampled input grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw DomainError("sampled input grid must be strictly increasing");
    double n2 = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const cplx a = values[i], b = values[i + 1];
        n2 += (grid[i + 1] - grid[i]) / 3.0 * (std::norm(a) + (a * std::conj(b)).real() + std::norm(b));
    }
    auto f = std::make_shared<Form>();
    f->kind = Form::sampled;
    f->grid = std::move(grid);
    f->values = std::move(values);
    return ScalarSignal(f, 1.0, std::sqrt(n2));
}

ScalarSignal ScalarSignal::function(std::function<cplx(double)> fn, double support_end, std::vector<double> breakpoints,
                                    std::string label) {
    if (!(support_end > 0.0) || !std::isfinite(support_end)) throw DomainError("function input needs finite support");
    auto f = std::make_shared<Form>();
    f->kind = Form::function;
    f->f = std::move(fn);
    f->support = support_end;
    f->bps = sorted_unique(std::move(breakpoints));
    f->label = std::move(label);
    auto r = piecewise<double>([&](double t) { return std::norm(f->f(t)); }, 0.0, support_end, f->bps, 1e-15, 1e-12);
    return ScalarSignal(f, 1.0, std::sqrt(r.value));
}

ScalarSignal ScalarSignal::decaying(std::function<cplx(double)> fn, std::function<double(double)> tail_l1,
                                    std::string label) {
    auto f = std::make_shared<Form>();
    f->kind = Form::decaying;
    f->f = std::move(fn);
    f->tail = std::move(tail_l1);
    f->label = std::move(label);
    auto head = quad::integrate<double>([&](double t) { return std::norm(f->f(t)); }, 0.0, 1.0, 1e-15, 1e-12);
    auto rest = quad::integrate_to_infinity<double>([&](double t) { return std::norm(f->f(t)); }, 1.0, 1e-15, 1e-12);
    return ScalarSignal(f, 1.0, std::sqrt(head.value + rest.value));
}

double ScalarSignal::support_end() const {
    switch (form_->kind) {
        case Form::sampled: return form_->grid.back();
        case Form::function: return form_->support;
        case Form::truncated: return std::min(form_->b, form_->base->support_end());
        case Form::reflected: return form_->b;
        default: return inf;
    }
}

std::vector<double> ScalarSignal::breakpoints() const {
    std::vector<double> out;
    switch (form_->kind) {
        case Form::sampled: out = form_->grid; break;
        case Form::function:
            out = form_->bps;
            out.push_back(form_->support);
            break;
        case Form::truncated:
            out.push_back(form_->a);
            out.push_back(form_->b);
            for (double x : form_->base->breakpoints())
                if (x > form_->a && x < form_->b) out.push_back(x);
            break;
        case Form::reflected:
            out.push_back(form_->b);
            for (double x : form_->base->breakpoints())
                if (x >= 0.0 && x <= form_->b) out.push_back(form_->b - x);
            break;
        default: break;
    }
    return sorted_unique(out);
}

double ScalarSignal::tail_l1(double T) const {
    const double s = std::abs(scale_);
    const Form& f = *form_;
    switch (f.kind) {
        case Form::exponential: return s * std::exp(-f.w.real() * T) / f.w.real();
        case Form::frame: {
            const double a = f.w.real();
            return s * 2.0 * std::pow(a, 1.5) * std::exp(-a * T) * (T / a + 1.0 / (a * a));
        }
        case Form::poly_exp: {
            const double a = f.w.real();
            double sum = 0.0;
            for (std::size_t k = 0; k < f.p.size(); ++k)
                sum += std::abs(f.p[k]) * boost::math::tgamma(static_cast<double>(k + 1), a * T) /
                       std::pow(a, static_cast<double>(k + 1));
            return s * sum;
        }
        case Form::decaying: return s * f.tail(T);
        default: {
            const double end = support_end();
            if (T >= end) return 0.0;
            return piecewise<double>([&](double t) { return std::abs((*this)(t)); }, std::max(T, 0.0), end,
                                     breakpoints(), 1e-15, 1e-10)
                .value;
        }
    }
}

std::optional<cplx> ScalarSignal::laplace(cplx mu) const {
    const Form& f = *form_;
    switch (f.kind) {
        case Form::exponential: return scale_ / (mu + f.w);
        case Form::frame: return scale_ * 2.0 * std::pow(f.w.real(), 1.5) / ((mu + f.w) * (mu + f.w));
        case Form::poly_exp: {
            cplx s = 0.0;
            for (std::size_t k = 0; k < f.p.size(); ++k)
                s += f.p[k] * boost::math::factorial<double>(static_cast<unsigned>(k)) /
                     std::pow(mu + f.w, static_cast<double>(k + 1));
            return scale_ * s;
        }
        default: return std::nullopt;
    }
}

std::string ScalarSignal::label() const {
    std::ostringstream os;
    const Form& f = *form_;
    switch (f.kind) {
        case Form::exponential: os << "exponential(w=" << f.w << ")"; break;
        case Form::frame: os << "frame(lambda=" << f.w << ")"; break;
        case Form::poly_exp: os << "poly_exp(degree=" << f.p.size() - 1 << ", w=" << f.w << ")"; break;
        case Form::sampled: os << "sampled(" << f.grid.size() << " nodes)"; break;
        case Form::function:
        case Form::decaying: os << f.label; break;
        case Form::truncated: os << f.base->label() << " on [" << f.a << ", " << f.b << "]"; break;
        default: os << "reflected(" << f.base->label() << ", b=" << f.b << ")"; break;
    }
    return os.str();
}

ScalarSignal ScalarSignal::scaled(cplx factor) const { return ScalarSignal(form_, scale_ * factor, norm_ * std::abs(factor)); }

ScalarSignal ScalarSignal::normalized() const {
    if (!(norm_ > 0.0)) throw DomainError("cannot normalize a zero input");
    return scaled(1.0 / norm_);
}

ScalarSignal ScalarSignal::truncated(double a, double b) const {
    if (!(a >= 0.0 && b > a) || !std::isfinite(b)) throw DomainError("truncation needs 0 <= a < b < inf");
    auto f = std::make_shared<Form>();
    f->kind = Form::truncated;
    f->base = std::make_shared<const ScalarSignal>(*this);
    f->a = a;
    f->b = b;
    ScalarSignal out(f, 1.0, 0.0);
    out.norm_ = std::sqrt(
        piecewise<double>([&](double t) { return std::norm((*this)(t)); }, a, b, out.breakpoints(), 1e-15, 1e-12).value);
    return out;
}

ScalarSignal ScalarSignal::reflected(double b) const {
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("reflection needs a finite endpoint b > 0");
    if (support_end() > b * (1.0 + 1e-14)) throw DomainError("reflection needs an input supported in [0, b]");
    auto f = std::make_shared<Form>();
    f->kind = Form::reflected;
    f->base = std::make_shared<const ScalarSignal>(*this);
    f->b = b;
    return ScalarSignal(f, 1.0, norm_);
}

double ModeCoefficients::norm() const {
    double s = 0.0;
    for (auto c : coefficients) s += std::norm(c);
    return std::sqrt(s);
}

namespace {

constexpr int L = 8;  // Legendre degrees per panel

std::array<double, L> legendre(double x) {
    std::array<double, L> p{};
    p[0] = 1.0;
    p[1] = x;
    for (int m = 1; m + 1 < L; ++m) p[m + 1] = ((2 * m + 1) * x * p[m] - m * p[m - 1]) / (m + 1);
    return p;
}

// Legendre coefficients of u on each panel
std::vector<std::array<cplx, L>> input_coefficients(const ScalarSignal& u, const TimeGrid& g) {
    const double h = g.step();
    const auto& gl = quad::gauss_rule<L>();
    const auto bps = u.breakpoints();
    std::vector<std::array<cplx, L>> a(g.K);
    for (int i = 0; i < g.K; ++i) {
        const double lo = i * h, hi = (i + 1) * h;
        bool kinked = false;
        for (double x : bps)
            if (x > lo + 1e-12 * h && x < hi - 1e-12 * h) kinked = true;
        if (!kinked) {
            for (int q = 0; q < L; ++q) {
                const cplx v = u(lo + 0.5 * h * (gl.x[q] + 1.0));
                const auto P = legendre(gl.x[q]);
                for (int m = 0; m < L; ++m) a[i][m] += 0.5 * (2 * m + 1) * gl.w[q] * P[m] * v;
            }
        } else {
            auto g2 = [&](double x) {
                quad::cvec v(L);
                const cplx uv = u(lo + 0.5 * h * (x + 1.0));
                const auto P = legendre(x);
                for (int m = 0; m < L; ++m) v[m] = P[m] * uv;
                return v;
            };
            std::vector<double> cuts;
            for (double x : bps)
                if (x > lo && x < hi) cuts.push_back(2.0 * (x - lo) / h - 1.0);
            auto r = piecewise<quad::cvec>(g2, -1.0, 1.0, cuts, 1e-15, 1e-12);
            for (int m = 0; m < L; ++m) a[i][m] = 0.5 * (2 * m + 1) * r.value[m];
        }
    }
    return a;
}

void mode_table(const ScalarResolvent& c, bool need_values, bool need_moments, const TimeGrid& g,
                std::vector<cplx>& values, std::vector<cplx>& moments) {
    if (need_values) {
        values.resize(g.K + 1);
        for (int k = 0; k <= g.K; ++k) values[k] = c(g.at(k));
    }
    if (!need_moments) return;
    const double h = g.step();
    moments.assign(static_cast<std::size_t>(g.K) * L, 0.0);
    for (int j = 0; j < g.K; ++j) {
        const double lo = j * h;
        auto f = [&](double x) {
            quad::cvec v(L);
            const cplx cv = c(lo + 0.5 * h * (x + 1.0));
            const auto P = legendre(x);
            for (int m = 0; m < L; ++m) v[m] = (m % 2 ? -P[m] : P[m]) * cv * (0.5 * h);
            return v;
        };
        auto r = quad::integrate<quad::cvec>(f, -1.0, 1.0, 1e-15 * h, 1e-12, 400);
        for (int m = 0; m < L; ++m) moments[static_cast<std::size_t>(j) * L + m] = r.value[m];
    }
}

std::vector<cplx> run_mode(const std::vector<cplx>& values, const std::vector<cplx>& M, cplx x0, cplx b,
                           const std::vector<std::array<cplx, L>>& a, int K) {
    std::vector<cplx> x(K + 1, 0.0);
    if (x0 != 0.0)
        for (int k = 0; k <= K; ++k) x[k] = values[k] * x0;
    if (b == 0.0) return x;
    for (int k = 1; k <= K; ++k) {
        cplx y = 0.0;
        for (int j = 0; j < k; ++j) {
            const auto& aj = a[k - 1 - j];
            const cplx* mj = &M[static_cast<std::size_t>(j) * L];
            for (int m = 0; m < L; ++m) y += aj[m] * mj[m];
        }
        x[k] += b * y;
    }
    return x;
}

SimulationResult assemble(std::vector<std::vector<cplx>> modes, const TimeGrid& g) {
    SimulationResult r;
    const std::size_t N = modes.size();
    r.t.resize(g.K + 1);
    r.state_norm.assign(g.K + 1, 0.0);
    r.running_max.assign(g.K + 1, 0.0);
    r.modes = std::move(modes);
    double mx = 0.0;
    for (int i = 0; i <= g.K; ++i) {
        r.t[i] = g.at(i);
        double s = 0.0;
        for (std::size_t n = 0; n < N; ++n) s += std::norm(r.modes[n][i]);
        r.state_norm[i] = std::sqrt(s);
        if (r.state_norm[i] > mx) {
            mx = r.state_norm[i];
            r.at_t = r.t[i];
        }
        r.running_max[i] = mx;
    }
    r.sup_norm = mx;
    return r;
}

SimulationResult run(const DiagonalSystem& sys, const Kernel& k, const std::vector<cplx>& x0, const ScalarSignal& u,
                     const TimeGrid& g, int threads) {
    const std::size_t N = sys.size();
    auto a = input_coefficients(u, g);
    std::vector<std::vector<cplx>> modes(N);
    parallel_for(
        N,
        [&](std::size_t n) {
            const cplx xn = x0.empty() ? cplx(0.0) : x0[n];
            const cplx bn = sys.b()[n];
            if (xn == 0.0 && bn == 0.0) {
                modes[n].assign(g.K + 1, 0.0);
                return;
            }
            ScalarResolvent c(k, sys.eigenvalues()[n]);
            std::vector<cplx> values, M;
            mode_table(c, xn != 0.0, bn != 0.0, g, values, M);
            modes[n] = run_mode(values, M, xn, bn, a, g.K);
        },
        threads);
    return assemble(std::move(modes), g);
}

}  // namespace

SimulationResult simulate_state(const DiagonalSystem& sys, const Kernel& k, const std::vector<cplx>& x0,
                                const ScalarSignal& u, const TimeGrid& grid, const SimulationOptions& opts) {
    if (!(grid.T > 0.0) || grid.K < 1) throw DomainError("simulation grid needs T > 0 and K >= 1");
    if (!x0.empty() && x0.size() != sys.size()) throw DomainError("initial state has the wrong number of modes");
    auto fine = run(sys, k, x0, u, grid, opts.threads);
    if (opts.estimate_error && grid.K % 2 == 0 && grid.K >= 2) {
        auto coarse = run(sys, k, x0, u, {grid.T, grid.K / 2}, opts.threads);
        double e = 0.0;
        for (int i = 0; i <= grid.K / 2; ++i) {
            double s = 0.0;
            for (std::size_t n = 0; n < sys.size(); ++n) s += std::norm(fine.modes[n][2 * i] - coarse.modes[n][i]);
            e = std::max(e, std::sqrt(s));
        }
        fine.error_estimate = e;
    }
    return fine;
}

ResolventTable::ResolventTable(const DiagonalSystem& sys, const Kernel& k, const TimeGrid& grid, int threads)
    : sys_(sys), grid_(grid) {
    if (!(grid.T > 0.0) || grid.K < 1) throw DomainError("simulation grid needs T > 0 and K >= 1");
    values_.resize(sys.size());
    moments_.resize(sys.size());
    parallel_for(
        sys.size(),
        [&](std::size_t n) {
            ScalarResolvent c(k, sys.eigenvalues()[n]);
            mode_table(c, true, sys.b()[n] != 0.0, grid, values_[n], moments_[n]);
        },
        threads);
}

SimulationResult simulate_state(const ResolventTable& table, const std::vector<cplx>& x0, const ScalarSignal& u,
                                int threads) {
    const auto& sys = table.system();
    const auto& g = table.grid();
    if (!x0.empty() && x0.size() != sys.size()) throw DomainError("initial state has the wrong number of modes");
    auto a = input_coefficients(u, g);
    std::vector<std::vector<cplx>> modes(sys.size());
    parallel_for(
        sys.size(),
        [&](std::size_t n) {
            modes[n] = run_mode(table.values(n), table.moments(n), x0.empty() ? cplx(0.0) : x0[n], sys.b()[n], a, g.K);
        },
        threads);
    return assemble(std::move(modes), g);
}

ModeCoefficients b_infinity_numeric(const DiagonalSystem& sys, const Kernel& k, const ScalarSignal& u, double T,
                                    int threads) {
    if (!(T > 0.0)) throw DomainError("B_inf horizon must be positive");
    const double end = std::min(T, u.support_end());
    const double tail = u.support_end() <= T ? 0.0 : u.tail_l1(T);
    if (!std::isfinite(tail)) throw DomainError("input has no decay certificate");
    std::vector<double> cuts = u.breakpoints();
    for (double x : {1e-6, 1e-4, 1e-2}) cuts.push_back(x * end);
    for (double x = 1.0; x < end; x += 1.0) cuts.push_back(x);
    ModeCoefficients out;
    out.tail_bound = tail;
    const std::size_t N = sys.size();
    out.coefficients.assign(N, 0.0);
    out.error.assign(N, 0.0);
    parallel_for(
        N,
        [&](std::size_t n) {
            const cplx b = sys.b()[n];
            if (b == 0.0) return;
            ScalarResolvent c(k, sys.eigenvalues()[n]);
            auto r = piecewise<cplx>([&](double s) { return c(s) * u(s); }, 0.0, end, cuts, 1e-15, 1e-12);
            double env = 0.0;
            if (tail > 0.0)
                for (int i = 0; i <= 32; ++i) env = std::max(env, std::abs(c(0.5 * T * (1.0 + i / 32.0))));
            out.coefficients[n] = b * r.value;
            out.error[n] = std::abs(b) * (r.error + env * tail);
        },
        threads);
    return out;
}

ExponentialAction action_on_exponential(const DiagonalSystem& sys, const Kernel& k, cplx lambda) {
    ExponentialAction out;
    const cplx a = laplace_transform(k, lambda);
    for (std::size_t n = 0; n < sys.size(); ++n) {
        const cplx d = 1.0 - a * sys.eigenvalues()[n];
        if (std::abs(d) < 1e-14) throw PoleError("action_on_exponential: 1 - a_hat(lambda) lambda_n vanishes");
        const cplx v = sys.b()[n] / (lambda * d);
        out.coefficients.push_back(v);
        out.squared_norm += std::norm(v);
    }
    return out;
}

}  // namespace volterra
