#include "rcext/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rcext/fft.hpp"
#include "rcext/random.hpp"

namespace rcext {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double adaptive_simpson(double (*f)(double, double), double tau, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm, tau), frm = f(rm, tau);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // the roundoff floor stops subdivision once the correction is pure noise
    const double floor =
        4.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
    if (depth <= 0 || std::abs(delta) <= std::max(15.0 * tol, floor))
        return left + right + delta / 15.0;
    return adaptive_simpson(f, tau, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, tau, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// integrand after s = sin(u): exp(-tau^2/(1+sin u)) / (2 pi), smooth on
// (-pi/2, pi/2]; at u = -pi/2 the limit is 0 for tau != 0 and 1/(2 pi) for
// tau = 0
double price_integrand_arcsine(double u, double tau) {
    const double den = 1.0 + std::sin(u);
    if (den <= 0.0) return tau == 0.0 ? 1.0 / kTwoPi : 0.0;
    return std::exp(-tau * tau / den) / kTwoPi;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    // Acklam's rational approximation
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= phigh) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // one Halley step against the exact CDF
    const double e = normal_cdf(x) - p;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
    const double u = e / pdf;
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double price_integrand(double s, double tau) {
    if (std::abs(s) >= 1.0)
        throw std::invalid_argument("price_integrand: |s| must be below 1");
    return std::exp(-tau * tau / (1.0 + s)) / (kTwoPi * std::sqrt(1.0 - s * s));
}

double price_forward(double c_x, double tau) {
    if (std::abs(c_x) > 1.0 + 1e-12)
        throw std::invalid_argument("price_forward: |c_x| must be at most 1");
    c_x = std::clamp(c_x, -1.0, 1.0);
    if (c_x == 0.0) return 0.0;
    const double ub = std::asin(c_x);
    const double fa = price_integrand_arcsine(0.0, tau);
    const double fb = price_integrand_arcsine(ub, tau);
    const double fm = price_integrand_arcsine(0.5 * ub, tau);
    const double whole = ub / 6.0 * (fa + 4.0 * fm + fb);
    // well below the documented 1e-10 budget; the inverse map relies on the
    // low subdivision jitter
    return adaptive_simpson(price_integrand_arcsine, tau, 0.0, ub, fa, fm, fb, whole, 1e-13,
                            40);
}

double price_inverse(double c_y, double tau) {
    const double lo_val = price_forward(-1.0, tau);
    const double hi_val = price_forward(1.0, tau);
    if (c_y < lo_val - 1e-12 || c_y > hi_val + 1e-12)
        throw std::invalid_argument("price_inverse: c_y outside the forward range");
    if (c_y == 0.0) return 0.0;
    // bisect down to interval resolution; the forward map is deterministic,
    // so this lands well inside the documented 1e-10 value tolerance
    double lo = -1.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 4e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (price_forward(mid, tau) < c_y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double estimate_threshold(const DataRecord& binary_field) {
    const double mean = binary_field.values().real().mean();
    if (!(mean > 0.0 && mean < 1.0))
        throw std::invalid_argument(
            "estimate_threshold: field mean must be strictly inside (0,1)");
    return normal_quantile(1.0 - mean);
}

FilterCoefficients factorize_spectrum(const GridField& spectrum_samples) {
    const GridSpec& grid = spectrum_samples.grid();
    if (grid.offset())
        throw std::invalid_argument("factorize_spectrum: requires an aligned (non-offset) grid");
    if (spectrum_samples.min() <= 0.0)
        throw std::invalid_argument("factorize_spectrum: samples must be strictly positive");
    const long m = grid.node_count();
    const int d = grid.dim();
    const auto& shape = grid.shape();

    // cepstrum: coefficients of log Phi
    std::vector<std::complex<double>> cep(m);
    for (long j = 0; j < m; ++j) cep[j] = std::log(spectrum_samples.values()[j]);
    detail::fft(shape, cep.data(), false);
    for (long j = 0; j < m; ++j) cep[j] /= static_cast<double>(m);

    // keep the causal half (lexicographically positive signed indices), half
    // weight on self-conjugate indices, so that 2 Re L+ = log Phi on the
    // grid. A component equal to N/2 is its own negation mod N and must act
    // as zero when ordering, otherwise both members of a mixed pair like
    // (N/2, k) and (N/2, -k) would land on the same side.
    std::vector<int> idx(d, 0);
    for (long j = 0; j < m; ++j) {
        int sign = 0;
        bool self_conj = true;
        for (int a = 0; a < d; ++a) {
            const int k = idx[a] * 2 <= shape[a] ? idx[a] : idx[a] - shape[a];
            const bool nyquist = (2 * k == shape[a]);
            if (k != 0 && !nyquist) {
                self_conj = false;
                if (sign == 0) sign = k > 0 ? 1 : -1;
            }
        }
        double w;
        if (self_conj)
            w = 0.5;
        else
            w = sign > 0 ? 1.0 : 0.0;
        cep[j] *= w;
        int a = d - 1;
        while (a >= 0 && idx[a] == shape[a] - 1) { idx[a] = 0; --a; }
        if (a >= 0) ++idx[a];
    }

    // B = exp(L+) sampled on the grid, then back to coefficients
    std::vector<std::complex<double>> bsamp = cep;
    detail::fft(shape, bsamp.data(), true);
    std::vector<std::complex<double>> bcoef(m);
    double recon_err = 0.0;
    for (long j = 0; j < m; ++j) {
        bsamp[j] = std::exp(bsamp[j]);
        recon_err = std::max(recon_err, std::abs(std::norm(bsamp[j]) -
                                                 spectrum_samples.values()[j]) /
                                            spectrum_samples.values()[j]);
        bcoef[j] = bsamp[j];
    }
    detail::fft(shape, bcoef.data(), false);

    FilterCoefficients out;
    out.shape = shape;
    out.coeffs.resize(m);
    double imag_max = 0.0, scale = 0.0;
    for (long j = 0; j < m; ++j) {
        const std::complex<double> v = bcoef[j] / static_cast<double>(m);
        out.coeffs[j] = v.real();
        imag_max = std::max(imag_max, std::abs(v.imag()));
        scale = std::max(scale, std::abs(v.real()));
    }
    if (imag_max > 1e-6 * (scale > 0 ? scale : 1.0))
        throw std::runtime_error(
            "factorize_spectrum: spectrum lacks the evenness needed for a real filter");
    out.reconstruction_error = recon_err;
    return out;
}

WeightMatrix default_texture_weight(const IndexSet& set) {
    return WeightMatrix::scalar(set, 0.01);
}

WienerModel identify(const DataRecord& binary_field, const IndexSet& set, const WeightMatrix& w,
                     const SolverConfig& config) {
    const double tau = estimate_threshold(binary_field);
    const double mean = binary_field.values().real().mean();

    HermitianSeq cy = biased_cov(binary_field, set);
    Eigen::VectorXcd cy_v = cy.values();
    cy_v.array() -= mean * mean;

    // rescale so the zero lag maps exactly to c^x_0 = 1
    const double cy0_target = price_forward(1.0, tau);
    const double cy0 = cy_v[set.zero_index()].real();
    if (!(cy0 > 0.0))
        throw std::runtime_error("identify: binary field has no variance");
    cy_v *= cy0_target / cy0;

    int clamped = 0;
    Eigen::VectorXcd cx_v(set.size());
    const double lo = price_forward(-1.0, tau), hi = cy0_target;
    for (int i = 0; i < set.size(); ++i) {
        if (i == set.zero_index()) {
            cx_v[i] = 1.0;
            continue;
        }
        double v = cy_v[i].real();  // binary data: covariances are real
        if (v < lo || v > hi) {
            v = std::clamp(v, lo, hi);
            ++clamped;
        }
        cx_v[i] = price_inverse(v, tau);
    }
    HermitianSeq cx(set, std::move(cx_v));

    const HermitianSeq prior = HermitianSeq::unit(set);
    const DualSolution sol = solve_soft(cx, prior, w, config);

    // factor P/Q on an aligned grid of the same resolution
    const GridSpec fgrid(config.grid.shape(), false);
    const GridField pf = synthesize(prior, fgrid);
    const GridField qf = synthesize(sol.q, fgrid);
    const double qfloor = 1e-8 * qf.values().cwiseAbs().maxCoeff();
    Eigen::VectorXd phi =
        (pf.values().array() / qf.values().array().max(qfloor)).matrix();
    phi = phi.cwiseMax(1e-10 * phi.maxCoeff());

    WienerModel model(tau, prior, sol.q, factorize_spectrum(GridField(fgrid, std::move(phi))));
    model.clamped_lags = clamped;
    return model;
}

DataRecord synthesize_texture(const WienerModel& model, const std::vector<int>& shape,
                              std::uint64_t seed) {
    const int d = static_cast<int>(model.filter.shape.size());
    if (static_cast<int>(shape.size()) != d)
        throw std::invalid_argument("synthesize_texture: dimension mismatch");
    long m = 1;
    for (int a = 0; a < d; ++a) {
        if (shape[a] < model.filter.shape[a])
            throw std::invalid_argument(
                "synthesize_texture: output smaller than the filter support");
        m *= shape[a];
    }

    // embed the filter on the output torus, signed indices preserved
    std::vector<std::complex<double>> fbuf(m, 0.0);
    {
        const auto& fs = model.filter.shape;
        std::vector<int> idx(d, 0);
        for (long j = 0; j < model.filter.coeffs.size(); ++j) {
            long dest = 0;
            for (int a = 0; a < d; ++a) {
                const int k = idx[a] * 2 <= fs[a] ? idx[a] : idx[a] - fs[a];
                const int wrapped = k >= 0 ? k : k + shape[a];
                dest = dest * shape[a] + wrapped;
            }
            fbuf[dest] = model.filter.coeffs[j];
            int a = d - 1;
            while (a >= 0 && idx[a] == fs[a] - 1) { idx[a] = 0; --a; }
            if (a >= 0) ++idx[a];
        }
    }
    detail::fft(shape, fbuf.data(), true);

    detail::GaussianStream noise(seed);
    std::vector<std::complex<double>> xbuf(m);
    for (long j = 0; j < m; ++j) xbuf[j] = noise.next();
    detail::fft(shape, xbuf.data(), true);
    for (long j = 0; j < m; ++j) xbuf[j] *= fbuf[j];
    detail::fft(shape, xbuf.data(), false);

    Eigen::VectorXd x(m);
    for (long j = 0; j < m; ++j) x[j] = xbuf[j].real() / static_cast<double>(m);
    const double xmean = x.mean();
    x.array() -= xmean;
    const double sd = std::sqrt(x.squaredNorm() / static_cast<double>(m));
    if (sd > 0) x /= sd;

    Eigen::VectorXcd y(m);
    for (long j = 0; j < m; ++j) y[j] = x[j] > model.tau ? 1.0 : 0.0;
    return {shape, std::move(y)};
}

double predicted_binary_covariance(const WienerModel& model, const std::vector<int>& lag) {
    const auto& fs = model.filter.shape;
    const int d = static_cast<int>(fs.size());
    if (static_cast<int>(lag.size()) != d)
        throw std::invalid_argument("predicted_binary_covariance: lag dimension mismatch");
    // the synthesized Gaussian layer carries the linear autocorrelation of
    // the signed-index filter (zero outside its box on a large-enough torus)
    auto flat_of_signed = [&](const std::vector<int>& k, bool& inside) -> long {
        long flat = 0;
        inside = true;
        for (int a = 0; a < d; ++a) {
            const int lo = fs[a] / 2 - fs[a] + 1;  // most negative signed index
            const int hi = fs[a] / 2;
            if (k[a] < lo || k[a] > hi) inside = false;
            const int wrapped = ((k[a] % fs[a]) + fs[a]) % fs[a];
            flat = flat * fs[a] + wrapped;
        }
        return flat;
    };
    double acc = 0.0, acc0 = 0.0;
    std::vector<int> t(d), tk(d);
    std::vector<int> idx(d, 0);
    for (long j = 0; j < model.filter.coeffs.size(); ++j) {
        for (int a = 0; a < d; ++a)
            t[a] = idx[a] * 2 <= fs[a] ? idx[a] : idx[a] - fs[a];
        for (int a = 0; a < d; ++a) tk[a] = t[a] + lag[a];
        bool inside = true;
        const long src = flat_of_signed(t, inside);
        const double bt = model.filter.coeffs[src];
        acc0 += bt * bt;
        bool inside2 = true;
        const long dst = flat_of_signed(tk, inside2);
        if (inside2) acc += bt * model.filter.coeffs[dst];
        int a = d - 1;
        while (a >= 0 && idx[a] == fs[a] - 1) { idx[a] = 0; --a; }
        if (a >= 0) ++idx[a];
    }
    if (!(acc0 > 0))
        throw std::runtime_error("predicted_binary_covariance: degenerate filter");
    return price_forward(std::clamp(acc / acc0, -1.0, 1.0), model.tau);
}

}  // namespace rcext
