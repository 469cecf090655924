#include "atslab/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ats {

namespace {

double ssr(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

std::vector<double> clamp_to(const std::vector<double>& x, const LmOptions& o) {
    std::vector<double> y = x;
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = std::clamp(y[j], o.lower[j], o.upper[j]);
    return y;
}

} // namespace

std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) throw std::runtime_error("solve_dense: singular");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri][c] * x[c];
        x[ri] = s / a[ri][ri];
    }
    return x;
}

LmResult levenberg_marquardt(const ResidualFn& fn, std::vector<double> x0,
                             const LmOptions& opts) {
    const std::size_t p = x0.size();
    if (opts.lower.size() != p || opts.upper.size() != p)
        throw std::invalid_argument("levenberg_marquardt: bounds size mismatch");

    std::vector<double> x = clamp_to(x0, opts);
    std::vector<double> r = fn(x);
    const std::size_t n = r.size();
    if (n < p) throw std::invalid_argument("levenberg_marquardt: fewer residuals than parameters");
    double s = ssr(r);
    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;

    std::vector<std::vector<double>> jac(n, std::vector<double>(p, 0.0));
    auto fill_jacobian = [&]() {
        for (std::size_t j = 0; j < p; ++j) {
            const double h = opts.rel_step * std::max(std::abs(x[j]), 1e-6);
            std::vector<double> xh = x;
            xh[j] = std::min(xh[j] + h, opts.upper[j]);
            const double hh = xh[j] - x[j];
            if (hh == 0.0) { // pinned at the upper bound; step down instead
                xh[j] = x[j] - h;
                const std::vector<double> rh = fn(xh);
                for (std::size_t i = 0; i < n; ++i) jac[i][j] = (r[i] - rh[i]) / h;
                continue;
            }
            const std::vector<double> rh = fn(xh);
            for (std::size_t i = 0; i < n; ++i) jac[i][j] = (rh[i] - r[i]) / hh;
        }
    };

    for (; iter < opts.max_iter; ++iter) {
        fill_jacobian();
        std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
        std::vector<double> g(p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                g[j] += jac[i][j] * r[i];
                for (std::size_t l = j; l < p; ++l) a[j][l] += jac[i][j] * jac[i][l];
            }
        }
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t l = 0; l < j; ++l) a[j][l] = a[l][j];

        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax < 1e-14 * std::max(1.0, s)) {
            converged = true;
            break;
        }

        bool accepted = false;
        while (lambda < 1e12) {
            auto am = a;
            for (std::size_t j = 0; j < p; ++j)
                am[j][j] += lambda * std::max(a[j][j], 1e-12);
            std::vector<double> neg_g(p);
            for (std::size_t j = 0; j < p; ++j) neg_g[j] = -g[j];
            std::vector<double> step;
            try {
                step = solve_dense(am, neg_g);
            } catch (const std::runtime_error&) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> xt(p);
            for (std::size_t j = 0; j < p; ++j) xt[j] = x[j] + step[j];
            xt = clamp_to(xt, opts);
            const std::vector<double> rt = fn(xt);
            const double st = ssr(rt);
            if (st < s) {
                const double dmse = (s - st) / static_cast<double>(n);
                x = xt;
                r = rt;
                s = st;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                // A tiny improvement only signals convergence when the trust
                // region is healthy; with lambda inflated it just means the
                // step was short.
                if (dmse <= opts.ftol * std::max(1.0, s / static_cast<double>(n)) &&
                    lambda <= 1e-1)
                    converged = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted) break; // lambda exhausted without a downhill step
        if (converged) break;
    }

    LmResult out;
    out.x = x;
    out.mse = s / static_cast<double>(n);
    out.converged = converged;
    out.iterations = iter;
    out.n_residuals = static_cast<int>(n);

    // Gauss-Newton covariance (J'J)^{-1} * mse at the solution. A start that
    // never left the penalty plateau has a null Jacobian; report an
    // uninformative diagonal instead of failing.
    fill_jacobian();
    std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            finite = finite && std::isfinite(jac[i][j]);
            for (std::size_t l = 0; l < p; ++l) a[j][l] += jac[i][j] * jac[i][l];
        }
    double dmax = 0.0;
    for (std::size_t j = 0; j < p; ++j) dmax = std::max(dmax, a[j][j]);
    out.covariance.assign(p, std::vector<double>(p, 0.0));
    if (!finite || dmax < 1e-200) {
        for (std::size_t j = 0; j < p; ++j) out.covariance[j][j] = 1e12;
        return out;
    }
    for (std::size_t j = 0; j < p; ++j) a[j][j] += 1e-12 * dmax; // keep invertible near flat axes
    try {
        for (std::size_t col = 0; col < p; ++col) {
            std::vector<double> e(p, 0.0);
            e[col] = 1.0;
            std::vector<double> inv_col = solve_dense(a, e);
            for (std::size_t rj = 0; rj < p; ++rj) out.covariance[rj][col] = inv_col[rj] * out.mse;
        }
    } catch (const std::runtime_error&) {
        out.covariance.assign(p, std::vector<double>(p, 0.0));
        for (std::size_t j = 0; j < p; ++j) out.covariance[j][j] = 1e12;
        return out;
    }
    // symmetrize roundoff
    for (std::size_t rj = 0; rj < p; ++rj)
        for (std::size_t c = rj + 1; c < p; ++c) {
            const double m = 0.5 * (out.covariance[rj][c] + out.covariance[c][rj]);
            out.covariance[rj][c] = out.covariance[c][rj] = m;
        }
    return out;
}

} // namespace ats
