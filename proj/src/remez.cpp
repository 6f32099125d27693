#include "refofdm/remez.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace refofdm {

namespace {

struct Grid {
    rvec x;       // cos(ω)
    rvec omega;
    rvec des;
    rvec wt;
    std::vector<int> band;
};

Grid make_grid(int r, const rvec& edges, const rvec& desired, const rvec& weights, int density)
{
    const double delf = 1.0 / double(density * r);
    Grid g;
    for (std::size_t b = 0; b < desired.size(); ++b) {
        const double lo = edges[2 * b];
        const double hi = edges[2 * b + 1];
        const int n = std::max(1, int((hi - lo) / delf + 0.5));
        for (int i = 0; i < n; ++i) {
            const double f = (i == n - 1) ? hi : lo + delf * double(i);
            g.omega.push_back(kPi * f);
            g.x.push_back(std::cos(kPi * f));
            g.des.push_back(desired[b]);
            g.wt.push_back(weights[b]);
            g.band.push_back(int(b));
        }
    }
    return g;
}

rvec bary_weights(const rvec& xs)
{
    const std::size_t n = xs.size();
    rvec w(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        double p = 1.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != k)
                p *= 2.0 * (xs[k] - xs[j]);
        w[k] = 1.0 / p;
    }
    return w;
}

}  // namespace

RemezResult remez(int numtaps, const rvec& edges, const rvec& desired, const rvec& weights,
                  int max_iter, int grid_density)
{
    if (numtaps < 1 || numtaps % 2 == 0)
        throw ValidationError("remez: numtaps must be odd and positive");
    if (edges.size() != 2 * desired.size() || weights.size() != desired.size() || desired.empty())
        throw ValidationError("remez: band description mismatch");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i] < 0.0 || edges[i] > 1.0 || (i > 0 && edges[i] < edges[i - 1]))
            throw ValidationError("remez: edges must be ascending in [0, 1]");
    }
    RemezResult res;
    if (numtaps == 1) {
        res.taps = {desired[0]};
        return res;
    }
    const int m = (numtaps - 1) / 2;
    const int r = m + 1;
    const Grid g = make_grid(r, edges, desired, weights, grid_density);
    const int ng = int(g.x.size());
    if (ng < r + 1)
        throw ValidationError("remez: frequency grid too coarse");

    // Initial extremal set at the Chebyshev nodes x_i = cos(πi/r), snapped to the grid.
    std::vector<int> ext(static_cast<std::size_t>(r + 1));
    for (int i = 0; i <= r; ++i) {
        const double target = kPi * double(i) / double(r);
        const auto it = std::lower_bound(g.omega.begin(), g.omega.end(), target);
        int idx = int(it - g.omega.begin());
        if (idx == ng || (idx > 0 && target - g.omega[std::size_t(idx - 1)] < g.omega[std::size_t(idx)] - target))
            --idx;
        ext[std::size_t(i)] = idx;
    }
    for (int i = 1; i <= r; ++i)
        ext[std::size_t(i)] = std::max(ext[std::size_t(i)], ext[std::size_t(i - 1)] + 1);
    for (int i = r - 1; i >= 0; --i)
        ext[std::size_t(i)] = std::min(ext[std::size_t(i)], ext[std::size_t(i + 1)] - 1);
    if (ext[0] < 0)
        throw ValidationError("remez: frequency grid too coarse");

    double delta = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    rvec xk, ck, wk;
    bool converged = false;
    int it = 0;
    for (; it < max_iter; ++it) {
        rvec xe(static_cast<std::size_t>(r + 1));
        for (int i = 0; i <= r; ++i)
            xe[std::size_t(i)] = g.x[std::size_t(ext[std::size_t(i)])];
        const rvec ad = bary_weights(xe);
        double num = 0.0, den = 0.0, sgn = 1.0;
        for (int i = 0; i <= r; ++i) {
            const auto e = std::size_t(ext[std::size_t(i)]);
            num += ad[std::size_t(i)] * g.des[e];
            den += sgn * ad[std::size_t(i)] / g.wt[e];
            sgn = -sgn;
        }
        delta = num / den;

        xk.assign(xe.begin(), xe.begin() + r);
        ck.assign(std::size_t(r), 0.0);
        sgn = 1.0;
        for (int i = 0; i < r; ++i) {
            const auto e = std::size_t(ext[std::size_t(i)]);
            ck[std::size_t(i)] = g.des[e] - sgn * delta / g.wt[e];
            sgn = -sgn;
        }
        wk = bary_weights(xk);

        auto eval = [&](double x) {
            double n = 0.0, d = 0.0;
            for (int i = 0; i < r; ++i) {
                const double dx = x - xk[std::size_t(i)];
                if (std::abs(dx) < 1e-15)
                    return ck[std::size_t(i)];
                const double t = wk[std::size_t(i)] / dx;
                n += t * ck[std::size_t(i)];
                d += t;
            }
            return n / d;
        };
        rvec err(static_cast<std::size_t>(ng));
        for (int i = 0; i < ng; ++i)
            err[std::size_t(i)] = g.wt[std::size_t(i)] * (g.des[std::size_t(i)] - eval(g.x[std::size_t(i)]));

        // Local extrema of the weighted error within each band, band edges included.
        std::vector<int> cand;
        for (int i = 0; i < ng; ++i) {
            const auto u = std::size_t(i);
            const bool first = i == 0 || g.band[u - 1] != g.band[u];
            const bool last = i == ng - 1 || g.band[u + 1] != g.band[u];
            const double e = std::abs(err[u]);
            const bool ge_left = first || e >= std::abs(err[u - 1]);
            const bool ge_right = last || e >= std::abs(err[u + 1]);
            if ((ge_left && ge_right) || std::binary_search(ext.begin(), ext.end(), i))
                cand.push_back(i);
        }
        // Merge runs of equal sign keeping the largest magnitude.
        std::vector<int> alt;
        for (int c : cand) {
            if (!alt.empty() && std::signbit(err[std::size_t(alt.back())]) == std::signbit(err[std::size_t(c)])) {
                if (std::abs(err[std::size_t(c)]) > std::abs(err[std::size_t(alt.back())]))
                    alt.back() = c;
            } else {
                alt.push_back(c);
            }
        }
        // Trim surplus extrema from the ends, dropping the smaller one.
        while (int(alt.size()) > r + 1) {
            if (std::abs(err[std::size_t(alt.front())]) < std::abs(err[std::size_t(alt.back())]))
                alt.erase(alt.begin());
            else
                alt.pop_back();
        }
        if (int(alt.size()) < r + 1)
            throw DesignFailure("remez: lost alternation", std::abs(delta));
        ext = alt;

        const double ad_now = std::abs(delta);
        if (std::abs(ad_now - prev) <= 1e-6 * ad_now) {
            converged = true;
            break;
        }
        prev = ad_now;
    }
    if (!converged)
        throw DesignFailure("remez: no convergence after " + std::to_string(max_iter) + " iterations",
                            std::abs(delta));

    auto eval_final = [&](double x) {
        double n = 0.0, d = 0.0;
        for (int i = 0; i < r; ++i) {
            const double dx = x - xk[std::size_t(i)];
            if (std::abs(dx) < 1e-15)
                return ck[std::size_t(i)];
            const double t = wk[std::size_t(i)] / dx;
            n += t * ck[std::size_t(i)];
            d += t;
        }
        return n / d;
    };
    // A(ω) = Σ a_n cos(nω); recover a_n from samples at Chebyshev angles.
    rvec a(std::size_t(m + 1), 0.0);
    rvec samples(static_cast<std::size_t>(m + 1));
    for (int k = 0; k <= m; ++k)
        samples[std::size_t(k)] = eval_final(std::cos(kPi * (k + 0.5) / double(m + 1)));
    for (int n = 0; n <= m; ++n) {
        double s = 0.0;
        for (int k = 0; k <= m; ++k)
            s += samples[std::size_t(k)] * std::cos(double(n) * kPi * (k + 0.5) / double(m + 1));
        a[std::size_t(n)] = s * 2.0 / double(m + 1);
    }
    a[0] *= 0.5;
    res.taps.assign(std::size_t(numtaps), 0.0);
    res.taps[std::size_t(m)] = a[0];
    for (int n = 1; n <= m; ++n) {
        res.taps[std::size_t(m - n)] = 0.5 * a[std::size_t(n)];
        res.taps[std::size_t(m + n)] = 0.5 * a[std::size_t(n)];
    }
    res.ripple = std::abs(delta);
    res.iterations = it + 1;
    return res;
}

}  // namespace refofdm
