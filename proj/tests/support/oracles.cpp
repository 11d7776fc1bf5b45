#include "oracles.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace testsup::oracle {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEps = DBL_EPSILON;
}

UnitVector3 rotate_rodrigues(const UnitVector3& axis, double angle, const UnitVector3& v) {
    const double c = std::cos(angle), s = std::sin(angle);
    const UnitVector3 k = axis;
    const UnitVector3 kxv{k.y * v.z - k.z * v.y, k.z * v.x - k.x * v.z, k.x * v.y - k.y * v.x};
    const double kdv = k.x * v.x + k.y * v.y + k.z * v.z;
    return {v.x * c + kxv.x * s + k.x * kdv * (1.0 - c),
            v.y * c + kxv.y * s + k.y * kdv * (1.0 - c),
            v.z * c + kxv.z * s + k.z * kdv * (1.0 - c)};
}

SphericalPoint erp_to_sphere_ref(double u, double v, int w, int h) {
    return {((u + 0.5) / w - 0.5) * 2.0 * kPi, (0.5 - (v + 0.5) / h) * kPi};
}

PixelCoord sphere_to_erp_ref(double lon, double lat, int w, int h) {
    double u = (lon / (2.0 * kPi) + 0.5) * w - 0.5;
    u = std::fmod(u, static_cast<double>(w));
    if (u < 0.0) u += w;
    const double v = (0.5 - lat / kPi) * h - 0.5;
    return {u, v};
}

double mae_ref(const Grid& s, const Mask& g) {
    double acc = 0.0;
    for (int r = 0; r < g.height(); ++r)
        for (int c = 0; c < g.width(); ++c)
            acc += std::fabs(static_cast<double>(s.at(0, r, c)) - g.at(r, c));
    return acc / (static_cast<double>(g.width()) * g.height());
}

namespace {

double f_of(double tp, double pred, double gt) {
    if (pred == 0.0 || tp == 0.0) return 0.0;
    const double p = tp / pred, r = tp / gt;
    return (1.0 + 0.3) * p * r / (0.3 * p + r);
}

} // namespace

double fbeta_ref(const Grid& s, const Mask& g) {
    const int w = g.width(), h = g.height();
    double mean = 0.0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) mean += s.at(0, r, c);
    mean /= static_cast<double>(w) * h;

    double tp = 0, pred = 0, gt = 0;
    const double t = std::min(2.0 * mean, 1.0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const bool on = mean != 0.0 && s.at(0, r, c) >= t;
            pred += on;
            gt += g.at(r, c);
            tp += on && g.at(r, c);
        }
    return f_of(tp, pred, gt);
}

double maxf_ref(const Grid& s, const Mask& g) {
    const int w = g.width(), h = g.height();
    double best = 0.0;
    for (int i = 0; i < 256; ++i) {
        const double t = i / 255.0;
        double tp = 0, pred = 0, gt = 0;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const bool on = s.at(0, r, c) >= t;
                pred += on;
                gt += g.at(r, c);
                tp += on && g.at(r, c);
            }
        best = std::max(best, f_of(tp, pred, gt));
    }
    return best;
}

BruteEdt brute_edt(const Mask& fg, bool wrap) {
    const int w = fg.width(), h = fg.height();
    const size_t n = static_cast<size_t>(w) * h;
    BruteEdt out;
    out.d2.assign(n, std::numeric_limits<int64_t>::max() / 4);
    out.nearest_row.assign(n, -1);
    out.nearest_col.assign(n, -1);

    const int tiles = wrap ? 3 : 1;
    const int col_offset = wrap ? w : 0; // queries live in the middle tile
    for (int r = 0; r < h; ++r) {
        for (int q = 0; q < w; ++q) {
            const size_t i = static_cast<size_t>(r) * w + q;
            for (int tc = 0; tc < tiles * w; ++tc) {
                const int c2 = tc % w;
                const int64_t dc = (q + col_offset) - tc;
                for (int r2 = 0; r2 < h; ++r2) {
                    if (!fg.at(r2, c2)) continue;
                    const int64_t dr = r - r2;
                    const int64_t d = dr * dr + dc * dc;
                    if (d < out.d2[i]) {
                        out.d2[i] = d;
                        out.nearest_row[i] = r2;
                        out.nearest_col[i] = c2;
                    }
                }
            }
        }
    }
    return out;
}

std::vector<double> gaussian7_ref(const std::vector<double>& in, int w, int h, bool wrap_h) {
    double k1[7], total = 0.0;
    for (int i = 0; i < 7; ++i) {
        k1[i] = std::exp(-((i - 3.0) * (i - 3.0)) / (2.0 * 5.0 * 5.0));
        total += k1[i];
    }
    std::vector<double> out(in.size(), 0.0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int dr = -3; dr <= 3; ++dr)
                for (int dc = -3; dc <= 3; ++dc) {
                    const int rr = r + dr;
                    int cc = c + dc;
                    if (rr < 0 || rr >= h) continue;
                    if (wrap_h)
                        cc = ((cc % w) + w) % w;
                    else if (cc < 0 || cc >= w)
                        continue;
                    acc += k1[dr + 3] * k1[dc + 3] / (total * total) *
                           in[static_cast<size_t>(rr) * w + cc];
                }
            out[static_cast<size_t>(r) * w + c] = acc;
        }
    return out;
}

double weighted_f_ref(const Grid& s, const Mask& g, bool wrap) {
    const int w = g.width(), h = g.height();
    const size_t n = static_cast<size_t>(w) * h;

    std::vector<double> e(n);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            e[static_cast<size_t>(r) * w + c] =
                std::fabs(static_cast<double>(s.at(0, r, c)) - g.at(r, c));

    const BruteEdt dt = brute_edt(g, wrap);

    std::vector<double> et = e;
    for (size_t i = 0; i < n; ++i)
        if (!g.data()[i])
            et[i] = e[static_cast<size_t>(dt.nearest_row[i]) * w + dt.nearest_col[i]];

    const std::vector<double> ea = gaussian7_ref(et, w, h, wrap);

    double gt = 0.0, fg_err = 0.0, bg_err = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (g.data()[i]) {
            gt += 1.0;
            fg_err += std::min(e[i], ea[i]);
        } else {
            bg_err += e[i] * (2.0 - std::exp(std::log(0.5) / 5.0 *
                                             std::sqrt(static_cast<double>(dt.d2[i]))));
        }
    }
    const double tpw = gt - fg_err;
    const double rw = 1.0 - fg_err / gt;
    const double pw = tpw / (kEps + tpw + bg_err);
    return (1.0 + 0.3) * rw * pw / (kEps + 0.3 * pw + rw);
}

namespace {

double object_sim(const std::vector<double>& x) {
    const size_t n = x.size();
    double mu = 0.0;
    for (double v : x) mu += v;
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mu) * (v - mu);
    const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    return 2.0 * mu / (mu * mu + 1.0 + sd + kEps);
}

double ssim_ref(const Grid& s, const Mask& g, int r0, int r1, int c0, int c1) {
    const double n = static_cast<double>(r1 - r0) * (c1 - c0);
    if (n <= 0.0) return 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) {
            const double x = s.at(0, r, c), y = g.at(r, c);
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
    const double mx = sx / n, my = sy / n;
    const double d = n - 1.0 + kEps;
    const double vx = (sxx - n * mx * mx) / d;
    const double vy = (syy - n * my * my) / d;
    const double cxy = (sxy - n * mx * my) / d;
    const double alpha = 4.0 * mx * my * cxy;
    const double beta = (mx * mx + my * my) * (vx + vy);
    if (alpha != 0.0) return alpha / (beta + kEps);
    return beta == 0.0 ? 1.0 : 0.0;
}

} // namespace

double s_measure_ref(const Grid& s, const Mask& g) {
    const int w = g.width(), h = g.height();
    const size_t n = static_cast<size_t>(w) * h;
    const size_t fg = g.count_foreground();

    double mean_s = 0.0;
    for (float v : s.data()) mean_s += v;
    mean_s /= static_cast<double>(n);
    if (fg == 0) return 1.0 - mean_s;
    if (fg == n) return mean_s;

    std::vector<double> on, off;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (g.at(r, c))
                on.push_back(s.at(0, r, c));
            else
                off.push_back(1.0 - s.at(0, r, c));
        }
    const double y = static_cast<double>(fg) / static_cast<double>(n);
    const double s_obj = y * object_sim(on) + (1.0 - y) * object_sim(off);

    double cx = 0.0, cy = 0.0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (g.at(r, c)) {
                cx += c + 1.0;
                cy += r + 1.0;
            }
    const int x0 = static_cast<int>(std::llround(cx / static_cast<double>(fg)));
    const int y0 = static_cast<int>(std::llround(cy / static_cast<double>(fg)));
    const double area = static_cast<double>(w) * h;
    const double w1 = x0 * y0 / area;
    const double w2 = (w - x0) * y0 / area;
    const double w3 = x0 * (h - y0) / area;
    const double w4 = 1.0 - w1 - w2 - w3;
    const double s_reg = w1 * ssim_ref(s, g, 0, y0, 0, x0) + w2 * ssim_ref(s, g, 0, y0, x0, w) +
                         w3 * ssim_ref(s, g, y0, h, 0, x0) + w4 * ssim_ref(s, g, y0, h, x0, w);

    const double q = 0.5 * s_obj + 0.5 * s_reg;
    return q < 0.0 ? 0.0 : q;
}

double e_measure_ref(const Grid& s, const Mask& g) {
    const int w = g.width(), h = g.height();
    const double n = static_cast<double>(w) * h;

    double mean_s = 0.0;
    for (float v : s.data()) mean_s += v;
    mean_s /= n;
    const double t = std::min(2.0 * mean_s, 1.0);
    std::vector<char> fm(static_cast<size_t>(w) * h, 0);
    if (mean_s != 0.0)
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) fm[static_cast<size_t>(r) * w + c] = s.at(0, r, c) >= t;

    const size_t fg = g.count_foreground();
    double acc = 0.0;
    if (fg == 0) {
        for (char v : fm) acc += v ? 0.0 : 1.0;
    } else if (fg == static_cast<size_t>(w) * h) {
        for (char v : fm) acc += v ? 1.0 : 0.0;
    } else {
        double mf = 0.0, mg = 0.0;
        for (char v : fm) mf += v;
        for (uint8_t v : g.data()) mg += v;
        mf /= n;
        mg /= n;
        for (size_t i = 0; i < fm.size(); ++i) {
            const double pf = fm[i] - mf, pg = g.data()[i] - mg;
            const double xi = 2.0 * pf * pg / (pf * pf + pg * pg + kEps);
            acc += (xi + 1.0) * (xi + 1.0) / 4.0;
        }
    }
    return acc / n;
}

PixelCoord gnomonic_source_ref(const sphereview::ViewportSpec& spec, int row, int col,
                               const GridDims& img_dims) {
    const double lam0 = spec.viewpoint.lon, phi0 = spec.viewpoint.lat;
    const double x = ((col + 0.5) / spec.out_w - 0.5) * 2.0 * std::tan(spec.fovh / 2.0);
    const double y = (0.5 - (row + 0.5) / spec.out_h) * 2.0 * std::tan(spec.fovv / 2.0);

    double lam, phi;
    const double rho = std::hypot(x, y);
    if (rho == 0.0) {
        lam = lam0;
        phi = phi0;
    } else {
        const double c = std::atan(rho);
        phi = std::asin(std::cos(c) * std::sin(phi0) +
                        y * std::sin(c) * std::cos(phi0) / rho);
        lam = lam0 + std::atan2(x * std::sin(c), rho * std::cos(phi0) * std::cos(c) -
                                                     y * std::sin(phi0) * std::sin(c));
    }
    return sphere_to_erp_ref(lam, phi, img_dims.w, img_dims.h);
}

double bilinear_sample_ref(const Grid& img, int channel, double u, double v) {
    const int w = img.width(), h = img.height();
    v = std::clamp(v, 0.0, static_cast<double>(h - 1));
    u = std::fmod(u, static_cast<double>(w));
    if (u < 0.0) u += w;

    const int c0 = static_cast<int>(std::floor(u));
    const int r0 = static_cast<int>(std::floor(v));
    const int c1 = (c0 + 1) % w;
    const int r1 = std::min(r0 + 1, h - 1);
    const double a = u - c0, b = v - r0;
    return (1.0 - a) * (1.0 - b) * img.at(channel, r0, c0) +
           a * (1.0 - b) * img.at(channel, r0, c1) + (1.0 - a) * b * img.at(channel, r1, c0) +
           a * b * img.at(channel, r1, c1);
}

Grid extract_viewport_ref(const Grid& img, const sphereview::ViewportSpec& spec) {
    Grid out(GridDims{spec.out_w, spec.out_h}, img.channels());
    for (int r = 0; r < spec.out_h; ++r)
        for (int c = 0; c < spec.out_w; ++c) {
            const PixelCoord src = gnomonic_source_ref(spec, r, c, img.dims());
            for (int ch = 0; ch < img.channels(); ++ch)
                out.at(ch, r, c) = static_cast<float>(bilinear_sample_ref(img, ch, src.u, src.v));
        }
    return out;
}

std::vector<double> gate_weights_ref(const Grid& fg, const sphereview::fusion::GatingParams& p) {
    const int C = fg.channels();
    std::vector<double> pooled(C, 0.0);
    for (int c = 0; c < C; ++c) {
        double acc = 0.0;
        for (int r = 0; r < fg.height(); ++r)
            for (int col = 0; col < fg.width(); ++col) acc += fg.at(c, r, col);
        pooled[c] = acc / (static_cast<double>(fg.width()) * fg.height());
    }
    std::vector<double> hidden(p.hidden, 0.0);
    for (int i = 0; i < p.hidden; ++i) {
        double acc = p.b1[i];
        for (int j = 0; j < C; ++j) acc += p.w1[static_cast<size_t>(i) * C + j] * pooled[j];
        hidden[i] = std::max(acc, 0.0);
    }
    std::vector<double> out(p.branches, 0.0);
    for (int k = 0; k < p.branches; ++k) {
        double acc = p.b2[k];
        for (int i = 0; i < p.hidden; ++i)
            acc += p.w2[static_cast<size_t>(k) * p.hidden + i] * hidden[i];
        out[k] = 1.0 / (1.0 + std::exp(-acc));
    }
    return out;
}

} // namespace testsup::oracle
