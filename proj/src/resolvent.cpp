#include "volterra/resolvent.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "volterra/errors.hpp"
#include "volterra/quadrature.hpp"

namespace volterra {

namespace {
constexpr double pi = std::numbers::pi;
}

cplx sigma(cplx lambda, cplx mu, const Kernel& k) {
    if (mu == 0.0) {
        if (!(lambda.real() > 0.0)) throw DomainError("sigma requires Re(lambda) > 0");
        return 1.0 / lambda;
    }
    cplx d = 1.0 + mu * laplace_transform(k, lambda);
    if (std::abs(d) < 1e-14) {
        std::ostringstream os;
        os << "sigma: 1 + mu a_hat(lambda) vanishes at lambda = " << lambda << ", mu = " << mu;
        throw PoleError(os.str());
    }
    return 1.0 / (lambda * d);
}

cplx c_exponential(cplx lambda_n, double xi, double s, double t) {
    if (t < 0.0) throw DomainError("c_exponential: t must be >= 0");
    const cplx d = s - lambda_n * xi;
    if (std::abs(d) < 1e-14) throw DomainError("c_exponential: degenerate s = lambda_n xi (double pole)");
    const cplx lx = lambda_n * xi;
    return s / d - (lx / d) * std::exp((lx - s) * t);
}

const char* to_string(MLPath p) {
    switch (p) {
        case MLPath::exponential: return "exponential";
        case MLPath::taylor: return "taylor";
        default: return "integral";
    }
}

namespace {

struct Taylor {
    cplx value;
    double error;
    bool ok;
};

Taylor ml_taylor(double beta, cplx z) {
    using ld = long double;
    const ld lr = std::log(static_cast<ld>(std::abs(z)));
    const ld th = std::arg(z);
    std::complex<ld> sum = 0;
    ld abs_sum = 0, prev_lm = std::numeric_limits<ld>::infinity();
    ld last = 0;
    for (int k = 0; k < 4000; ++k) {
        const ld lm = k * lr - std::lgamma(static_cast<ld>(beta) * k + 1);
        const ld mag = std::exp(lm);
        sum += std::polar(mag, k * th);
        abs_sum += mag;
        last = mag;
        if (k > 2 && lm < prev_lm && mag < 1e-22L * std::max<ld>(std::abs(sum), 1e-300L)) break;
        prev_lm = lm;
    }
    const double err = static_cast<double>(abs_sum * 4e-19L + last);
    const double mag = static_cast<double>(std::abs(sum));
    return {cplx(static_cast<double>(sum.real()), static_cast<double>(sum.imag())), err, err <= 1e-9 * mag};
}

struct Integral {
    cplx value;
    double error;
    bool ok;  // false when a pole sits on the branch cut
};

Integral ml_integral(double beta, cplx z) {
    const double r = std::abs(z);
    const double phi = std::arg(z);
    cplx residues = 0.0;
    for (int k = -1; k <= 1; ++k) {
        const double ang = phi + 2.0 * pi * k;
        if (std::abs(std::abs(ang) - beta * pi) < 1e-8) return {0.0, 0.0, false};
        if (std::abs(ang) < beta * pi) residues += std::exp(std::polar(std::pow(r, 1.0 / beta), ang / beta)) / beta;
    }
    const cplx rp = z * std::polar(1.0, pi * beta);
    const cplx rm = z * std::polar(1.0, -pi * beta);
    for (cplx root : {rp, rm})
        if (root.real() > 0 && std::abs(root.imag()) < 1e-8 * r) return {0.0, 0.0, false};
    const double inv_beta = 1.0 / beta;
    auto f = [&](double u) -> cplx {
        const double damp = std::exp(-std::pow(u, inv_beta));
        if (damp == 0.0) return 0.0;
        return damp / ((u - rp) * (u - rm));
    };
    std::vector<double> cuts{0.0};
    for (double b : {rp.real(), rm.real(), 1.0})
        if (b > 0) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cplx total = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto res = quad::integrate<cplx>(f, cuts[i], cuts[i + 1], 1e-300, 1e-13, 8000);
        total += res.value;
        err += res.error;
    }
    auto tail = quad::integrate_to_infinity<cplx>(f, cuts.back(), 1e-300, 1e-13, 8000);
    total += tail.value;
    err += tail.error;
    const cplx pref = -z * std::sin(pi * beta) / (pi * beta);
    const cplx value = residues + pref * total;
    const double abs_err = std::abs(pref) * err + 4e-16 * (std::abs(residues) + std::abs(pref * total));
    return {value, abs_err, true};
}

bool accurate(const cplx& v, double err) { return err <= std::max(1e-8 * std::abs(v), 1e-14); }

}  // namespace

namespace {

// a pole on the cut: average symmetric rotations of z and extrapolate (error O(eps^4))
Integral ml_on_cut(double beta, cplx z) {
    const double eps = 1e-5;
    Integral parts[4];
    const double shifts[4] = {eps, -eps, 2 * eps, -2 * eps};
    for (int i = 0; i < 4; ++i) {
        parts[i] = ml_integral(beta, z * std::polar(1.0, shifts[i]));
        if (!parts[i].ok) return {0.0, 0.0, false};
    }
    const cplx e1 = 0.5 * (parts[0].value + parts[1].value);
    const cplx e2 = 0.5 * (parts[2].value + parts[3].value);
    double err = 1e-2 * std::abs(e2 - e1);
    for (const auto& p : parts) err += p.error;
    return {(4.0 * e1 - e2) / 3.0, err, true};
}

MLValue finish(cplx z, cplx v, double err, MLPath path) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("mittag_leffler: overflow");
    if (z.imag() == 0.0) v.imag(0.0);
    return {v, err, path};
}

}  // namespace

MLValue mittag_leffler_eval(double beta, cplx z) {
    if (!(beta > 0.0 && beta < 2.0)) throw DomainError("mittag_leffler: beta must lie in (0, 2)");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("mittag_leffler: non-finite argument");
    if (z == 0.0) return {1.0, 0.0, MLPath::taylor};
    if (beta == 1.0) {
        cplx e = std::exp(z);
        return finish(z, e, 2e-16 * std::abs(e), MLPath::exponential);
    }
    if (std::abs(z) <= 5.0) {
        auto t = ml_taylor(beta, z);
        if (t.ok) return finish(z, t.value, t.error, MLPath::taylor);
    }
    auto in = ml_integral(beta, z);
    if (!in.ok) in = ml_on_cut(beta, z);
    if (in.ok && accurate(in.value, in.error)) return finish(z, in.value, in.error, MLPath::integral);
    if (std::abs(z) <= 60.0) {
        auto t = ml_taylor(beta, z);
        if (accurate(t.value, t.error)) return finish(z, t.value, t.error, MLPath::taylor);
    }
    throw AccuracyError("mittag_leffler: no evaluation path reached relative accuracy 1e-8",
                        in.ok ? in.error / std::max(std::abs(in.value), 1e-300) : std::numeric_limits<double>::infinity());
}

cplx mittag_leffler(double beta, cplx z) { return mittag_leffler_eval(beta, z).value; }

cplx c_power(cplx lambda_n, double beta, double t, double scale) {
    if (t < 0.0) throw DomainError("c_power: t must be >= 0");
    if (!(beta > 0.0 && beta < 2.0)) throw DomainError("c_power: beta must lie in (0, 2)");
    if (t == 0.0) return 1.0;
    return mittag_leffler(beta, scale * lambda_n * std::pow(t, beta));
}

namespace {

cplx talbot_sum(const LaplaceFunction& F, double t, int M, double sigma0) {
    const double r = 2.0 * M / (5.0 * t);
    cplx sum = std::exp(r * t) * F(sigma0 + r);
    for (int k = 1; k < M; ++k) {
        const double th = k * pi / M;
        const double cot = 1.0 / std::tan(th);
        const double sig = th + (th * cot - 1.0) * cot;
        const cplx s(r * th * cot, r * th);
        const cplx w(1.0, sig);
        sum += std::exp(s * t) * F(sigma0 + s) * w;
        const cplx sc = std::conj(s);
        sum += std::exp(sc * t) * F(sigma0 + sc) * std::conj(w);
    }
    return std::exp(sigma0 * t) * sum * (r / (2.0 * M));
}

// de Hoog quotient-difference acceleration of sum_{k=0}^{2M} a_k z^k
cplx dehoog_accelerate(const std::vector<cplx>& a, cplx z) {
    const int M = static_cast<int>(a.size() - 1) / 2;
    std::vector<std::vector<cplx>> e(2 * M + 1, std::vector<cplx>(M + 1, 0.0));
    std::vector<std::vector<cplx>> q(2 * M + 1, std::vector<cplx>(M + 1, 0.0));
    for (int i = 0; i < 2 * M; ++i) q[i][1] = a[i + 1] / a[i];
    for (int r = 1; r <= M; ++r) {
        for (int i = 2 * (M - r); i >= 0; --i) {
            if (r > 1) q[i][r] = q[i + 1][r - 1] * e[i + 1][r - 1] / e[i][r - 1];
            e[i][r] = q[i + 1][r] - q[i][r] + e[i + 1][r - 1];
        }
    }
    std::vector<cplx> d(2 * M + 1);
    d[0] = a[0];
    for (int m = 1; m <= M; ++m) {
        d[2 * m - 1] = -q[0][m];
        d[2 * m] = -e[0][m];
    }
    std::vector<cplx> A(2 * M + 2), B(2 * M + 2);
    A[0] = 0.0;
    B[0] = 1.0;
    A[1] = d[0];
    B[1] = 1.0;
    for (int n = 2; n <= 2 * M + 1; ++n) {
        const cplx dz = d[n - 1] * z;
        A[n] = A[n - 1] + dz * A[n - 2];
        B[n] = B[n - 1] + dz * B[n - 2];
    }
    const cplx h2M = 0.5 * (1.0 + z * (d[2 * M - 1] - d[2 * M]));
    const cplx R2M = -h2M * (1.0 - std::sqrt(1.0 + z * d[2 * M] / (h2M * h2M)));
    A[2 * M + 1] = A[2 * M] + R2M * A[2 * M - 1];
    B[2 * M + 1] = B[2 * M] + R2M * B[2 * M - 1];
    return A[2 * M + 1] / B[2 * M + 1];
}

cplx dehoog_sum(const LaplaceFunction& F, double t, int M, double sigma0, double tol) {
    const double T = 2.0 * t;
    const double gamma = sigma0 - std::log(0.1 * tol) / (2.0 * T);
    const cplx z = std::polar(1.0, pi * t / T);
    std::vector<cplx> up(2 * M + 1), down(2 * M + 1);
    const cplx f0 = 0.5 * F(gamma);
    up[0] = down[0] = f0;
    for (int k = 1; k <= 2 * M; ++k) {
        up[k] = F(cplx(gamma, k * pi / T));
        down[k] = F(cplx(gamma, -k * pi / T));
    }
    const cplx s = dehoog_accelerate(up, z) + dehoog_accelerate(down, std::conj(z));
    return std::exp(gamma * t) / (2.0 * T) * s;
}

}  // namespace

InversionResult invert_laplace(const LaplaceFunction& F, double t, const InversionOptions& opts) {
    if (!(t > 0.0)) throw DomainError("invert_laplace: t must be > 0");
    if (!(opts.tol > 0.0)) throw DomainError("invert_laplace: tolerance must be positive");
    cplx prev = 0.0;
    int nodes = 0;
    bool have_prev = false;
    double last_diff = std::numeric_limits<double>::infinity();
    if (opts.method == InversionMethod::talbot) {
        for (int M : {8, 16, 32, 64}) {
            cplx v = talbot_sum(F, t, M, opts.abscissa);
            nodes += 2 * M - 1;
            if (have_prev) {
                last_diff = std::abs(v - prev);
                if (last_diff <= opts.tol * std::max(1.0, std::abs(v))) return {v, last_diff, nodes};
            }
            prev = v;
            have_prev = true;
        }
    } else {
        for (int M : {10, 20, 40}) {
            cplx v = dehoog_sum(F, t, M, opts.abscissa, opts.tol);
            nodes += 2 * (2 * M) + 1;
            if (have_prev) {
                last_diff = std::abs(v - prev);
                if (last_diff <= opts.tol * std::max(1.0, std::abs(v))) return {v, last_diff, nodes};
            }
            prev = v;
            have_prev = true;
        }
    }
    std::ostringstream os;
    os << "invert_laplace: refinements differ by " << last_diff << " at t = " << t;
    throw ConvergenceError(os.str());
}

const char* to_string(ResolventMethod m) {
    switch (m) {
        case ResolventMethod::closed_form: return "closed_form";
        case ResolventMethod::mittag_leffler: return "mittag_leffler";
        default: return "numeric_inversion";
    }
}

namespace {

void require_stable(cplx lambda_n) {
    if (!(lambda_n.real() < 0.0)) throw DomainError("resolvent: eigenvalue must satisfy Re(lambda_n) < 0");
}

ResolventMethod natural_method(const Kernel& simple, cplx lambda_n) {
    if (const auto* p = std::get_if<PowerKernel>(&simple.variant()))
        return p->beta == 1.0 ? ResolventMethod::closed_form : ResolventMethod::mittag_leffler;
    if (const auto* e = std::get_if<ExponentialKernel>(&simple.variant())) {
        if (std::abs(e->s - lambda_n * e->xi) < 1e-14) return ResolventMethod::numeric_inversion;
        return ResolventMethod::closed_form;
    }
    return ResolventMethod::numeric_inversion;
}

}  // namespace

ScalarResolvent::ScalarResolvent(const Kernel& k, cplx lambda_n)
    : kernel_(k), simple_(simplify(k)), lambda_(lambda_n), method_(ResolventMethod::numeric_inversion) {
    require_stable(lambda_n);
    method_ = natural_method(simple_, lambda_n);
}

ScalarResolvent::ScalarResolvent(const Kernel& k, cplx lambda_n, ResolventMethod forced, InversionOptions inv)
    : kernel_(k), simple_(simplify(k)), lambda_(lambda_n), method_(forced), inv_(inv) {
    require_stable(lambda_n);
    if (forced != ResolventMethod::numeric_inversion && natural_method(simple_, lambda_n) != forced)
        throw UnsupportedKernel(std::string("resolvent method ") + to_string(forced) + " unavailable for " + k.name());
}

cplx ScalarResolvent::operator()(double t) const {
    if (t < 0.0) throw DomainError("resolvent: t must be >= 0");
    if (t == 0.0) return 1.0;
    switch (method_) {
        case ResolventMethod::closed_form:
            if (const auto* p = std::get_if<PowerKernel>(&simple_.variant())) return std::exp(lambda_ * p->scale * t);
            {
                const auto& e = std::get<ExponentialKernel>(simple_.variant());
                return c_exponential(lambda_, e.xi, e.s, t);
            }
        case ResolventMethod::mittag_leffler: {
            const auto& p = std::get<PowerKernel>(simple_.variant());
            return c_power(lambda_, p.beta, t, p.scale);
        }
        default: {
            const Kernel& k = kernel_;
            const cplx ln = lambda_;
            auto F = [&k, ln](cplx l) { return 1.0 / (l * (1.0 - ln * laplace_continued(k, l))); };
            return invert_laplace(F, t, inv_).value;
        }
    }
}

namespace {

// weights w_i with sum_i w_i p(y_i) = int_0^1 y^(beta-1) p(y) dy for deg p < n
template <std::size_t N>
std::array<double, N> singular_moment_weights(const std::array<double, N>& y, double beta) {
    using ld = long double;
    std::array<std::array<ld, N + 1>, N> m{};
    for (std::size_t p = 0; p < N; ++p) {
        for (std::size_t i = 0; i < N; ++i) m[p][i] = std::pow(static_cast<ld>(y[i]), static_cast<ld>(p));
        m[p][N] = 1.0L / (static_cast<ld>(p) + beta);
    }
    for (std::size_t c = 0; c < N; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < N; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        std::swap(m[c], m[piv]);
        for (std::size_t r = 0; r < N; ++r) {
            if (r == c) continue;
            const ld f = m[r][c] / m[c][c];
            for (std::size_t k = c; k <= N; ++k) m[r][k] -= f * m[c][k];
        }
    }
    std::array<double, N> w{};
    for (std::size_t i = 0; i < N; ++i) w[i] = static_cast<double>(m[i][N] / m[i][i]);
    return w;
}

}  // namespace

ResidualProfile resolvent_residual(const Kernel& k, cplx lambda_n, const std::function<cplx(double)>& c,
                                   const std::vector<double>& t_grid) {
    const TimeDensity dens = time_density(k);
    ResidualProfile out;
    if (t_grid.empty()) return out;
    if (std::abs(t_grid[0]) > 1e-15) throw DomainError("resolvent_residual: grid must start at t = 0");
    const std::size_t K = t_grid.size() - 1;
    const double h = K > 0 ? t_grid[1] : 1.0;
    if (K > 0 && !(h > 0)) throw DomainError("resolvent_residual: grid must be increasing");
    for (std::size_t i = 0; i <= K; ++i)
        if (std::abs(t_grid[i] - i * h) > 1e-9 * std::max(1.0, t_grid[i]))
            throw DomainError("resolvent_residual: grid must be uniform");

    const double beta = dens.beta;
    auto a = [&](double tau) { return (beta == 1.0 ? 1.0 : std::pow(tau, beta - 1.0)) * dens.g(tau); };

    constexpr int Q = 8;
    const auto& gl = quad::gauss_rule<Q>();
    std::array<double, Q> xi{}, om{};
    for (int i = 0; i < Q; ++i) {
        xi[i] = 0.5 * (gl.x[i] + 1.0);
        om[i] = 0.5 * gl.w[i];
    }

    // c on regular panels j >= 1
    std::vector<std::array<cplx, Q>> C(K > 0 ? K : 1);
    for (std::size_t j = 1; j < K; ++j)
        for (int i = 0; i < Q; ++i) C[j][i] = c((j + xi[i]) * h);

    // graded first panel
    constexpr int levels = 40;
    std::vector<double> s0, w0;
    std::vector<cplx> c0;
    for (int m = 0; m <= levels; ++m) {
        const double hi = h * std::ldexp(1.0, -m);
        const double lo = m == levels ? 0.0 : 0.5 * hi;
        for (int i = 0; i < Q; ++i) {
            s0.push_back(lo + (hi - lo) * xi[i]);
            w0.push_back((hi - lo) * om[i]);
        }
    }
    if (K >= 2)
        for (double s : s0) c0.push_back(c(s));

    // Toeplitz weights by lag
    std::vector<std::array<double, Q>> W(K > 1 ? K - 1 : 1);
    for (std::size_t d = 1; d + 1 < K; ++d)
        for (int i = 0; i < Q; ++i) W[d][i] = om[i] * h * a((d + 1 - xi[i]) * h);

    // adjacent panel: exact moments of tau^(beta-1)
    std::array<double, Q> y{};
    for (int i = 0; i < Q; ++i) y[i] = 1.0 - xi[i];
    const auto mw = singular_moment_weights<Q>(y, beta);
    const double hb = std::pow(h, beta);
    std::array<double, Q> adj{};
    for (int i = 0; i < Q; ++i) adj[i] = hb * mw[i] * dens.g(y[i] * h);

    out.t.resize(K + 1);
    out.residual.resize(K + 1);
    out.t[0] = 0.0;
    out.residual[0] = std::abs(c(0.0) - 1.0);
    for (std::size_t kk = 1; kk <= K; ++kk) {
        const double t = kk * h;
        cplx I = 0.0;
        if (kk == 1) {
            auto left = quad::integrate<cplx>([&](double s) { return a(h - s) * c(s); }, 0.0, 0.5 * h, 1e-16, 1e-13);
            const double ib = 1.0 / beta;
            auto right = quad::integrate<cplx>(
                [&](double v) {
                    const double tau = std::pow(v, ib);
                    return dens.g(tau) * c(h - tau);
                },
                0.0, std::pow(0.5 * h, beta), 1e-16, 1e-13);
            I = left.value + right.value / beta;
        } else {
            for (std::size_t q = 0; q < s0.size(); ++q) I += w0[q] * a(t - s0[q]) * c0[q];
            for (std::size_t j = 1; j + 1 < kk; ++j) {
                const auto& w = W[kk - 1 - j];
                const auto& cj = C[j];
                for (int i = 0; i < Q; ++i) I += w[i] * cj[i];
            }
            const auto& ca = C[kk - 1];
            for (int i = 0; i < Q; ++i) I += adj[i] * ca[i];
        }
        out.t[kk] = t;
        out.residual[kk] = std::abs(c(t) - 1.0 - lambda_n * I);
    }
    for (std::size_t i = 0; i <= K; ++i)
        if (out.residual[i] > out.max || i == 0) {
            out.max = out.residual[i];
            out.at = out.t[i];
        }
    return out;
}

}  // namespace volterra
