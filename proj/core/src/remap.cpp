#include "sphereview/remap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>

namespace sphereview {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSnapTol = 0x1p-20; // ~9.5e-7 px, below the field accuracy contract

double snap(double x) {
    double r = std::nearbyint(x);
    return std::abs(x - r) <= kSnapTol ? r : x;
}

PixelCoord normalize_source(PixelCoord pc, const GridDims& dims) {
    pc.u = wrap_u(snap(pc.u), dims.w) + 0.0; // +0.0 folds -0.0
    pc.v = std::clamp(snap(pc.v), 0.0, static_cast<double>(dims.h));
    return pc;
}

struct BilinearTap {
    int r0, r1, c0, c1;
    float fu, fv;
};

BilinearTap make_bilinear_tap(const PixelCoord& pc, const GridDims& dims) {
    double u0 = std::floor(pc.u);
    double v0 = std::floor(pc.v);
    BilinearTap t;
    t.fu = static_cast<float>(pc.u - u0);
    t.fv = static_cast<float>(pc.v - v0);
    t.c0 = static_cast<int>(u0);
    t.c1 = t.c0 + 1 == dims.w ? 0 : t.c0 + 1;
    t.r0 = std::clamp(static_cast<int>(v0), 0, dims.h - 1);
    t.r1 = std::clamp(static_cast<int>(v0) + 1, 0, dims.h - 1);
    return t;
}

size_t nearest_index(const PixelCoord& pc, const GridDims& dims) {
    int c = static_cast<int>(std::floor(pc.u + 0.5));
    if (c == dims.w) c = 0;
    int r = std::clamp(static_cast<int>(std::floor(pc.v + 0.5)), 0, dims.h - 1);
    return static_cast<size_t>(r) * dims.w + c;
}

} // namespace

PixelCoord transform_pixel(const PixelCoord& pix, const MobiusTransform& f, const GridDims& dims) {
    SphericalPoint sp = erp_to_sphere(pix, dims);
    UnitVector3 v = sphere_to_cartesian(sp);
    UnitVector3 moved = apply_on_sphere(f, v);
    return sphere_to_erp(cartesian_to_sphere(moved), dims);
}

RemapField build_remap_field(const MobiusTransform& f, const GridDims& dims) {
    require_erp(dims, "build_remap_field");
    RemapField field{dims, std::vector<PixelCoord>(static_cast<size_t>(dims.w) * dims.h)};

    MobiusTransform finv = inverse(f);
    if (finv.is_identity()) {
        for (int i = 0; i < dims.h; ++i)
            for (int j = 0; j < dims.w; ++j)
                field.at(i, j) = {static_cast<double>(j), static_cast<double>(i)};
        return field;
    }

    // Row/column trig is shared across the grid; the per-pixel products below
    // match sphere_to_cartesian(erp_to_sphere(...)) operation for operation.
    std::vector<double> sin_lon(dims.w), cos_lon(dims.w);
    for (int j = 0; j < dims.w; ++j) {
        double lon = (2.0 * j + 1.0 - dims.w) * (kPi / dims.w);
        sin_lon[j] = std::sin(lon);
        cos_lon[j] = std::cos(lon);
    }
    for (int i = 0; i < dims.h; ++i) {
        double lat = (dims.h - 1.0 - 2.0 * i) * (kPi / (2.0 * dims.h));
        double sl = std::sin(lat), cl = std::cos(lat);
        for (int j = 0; j < dims.w; ++j) {
            UnitVector3 v{cl * cos_lon[j], cl * sin_lon[j], sl};
            UnitVector3 moved = inverse_stereographic(apply(finv, stereographic(v)));
            PixelCoord src = sphere_to_erp(cartesian_to_sphere(moved), dims);
            field.at(i, j) = normalize_source(src, dims);
        }
    }
    return field;
}

Grid warp_image(const Grid& img, const RemapField& field, Interp interp) {
    if (!(img.dims() == field.dims))
        throw std::invalid_argument("warp_image: image and field dimensions differ");
    const GridDims& dims = img.dims();
    Grid out(dims, img.channels());
    size_t n = field.src.size();

    if (interp == Interp::Nearest) {
        std::vector<size_t> taps(n);
        for (size_t k = 0; k < n; ++k) taps[k] = nearest_index(field.src[k], dims);
        for (int c = 0; c < img.channels(); ++c) {
            const float* in = img.plane(c);
            float* dst = out.plane(c);
            for (size_t k = 0; k < n; ++k) dst[k] = in[taps[k]];
        }
        return out;
    }

    std::vector<BilinearTap> taps(n);
    for (size_t k = 0; k < n; ++k) taps[k] = make_bilinear_tap(field.src[k], dims);
    for (int c = 0; c < img.channels(); ++c) {
        const float* in = img.plane(c);
        float* dst = out.plane(c);
        for (size_t k = 0; k < n; ++k) {
            const BilinearTap& t = taps[k];
            const float* top = in + static_cast<size_t>(t.r0) * dims.w;
            const float* bot = in + static_cast<size_t>(t.r1) * dims.w;
            // lerp as a + t*(b - a) reproduces endpoint values exactly
            float v0 = top[t.c0] + t.fu * (top[t.c1] - top[t.c0]);
            float v1 = bot[t.c0] + t.fu * (bot[t.c1] - bot[t.c0]);
            dst[k] = v0 + t.fv * (v1 - v0);
        }
    }
    return out;
}

float sample_channel(const Grid& img, int channel, const PixelCoord& pc, Interp interp) {
    const GridDims& dims = img.dims();
    PixelCoord n{wrap_u(pc.u, dims.w), std::clamp(pc.v, 0.0, static_cast<double>(dims.h))};
    const float* in = img.plane(channel);
    if (interp == Interp::Nearest) return in[nearest_index(n, dims)];
    BilinearTap t = make_bilinear_tap(n, dims);
    const float* top = in + static_cast<size_t>(t.r0) * dims.w;
    const float* bot = in + static_cast<size_t>(t.r1) * dims.w;
    float v0 = top[t.c0] + t.fu * (top[t.c1] - top[t.c0]);
    float v1 = bot[t.c0] + t.fu * (bot[t.c1] - bot[t.c0]);
    return v0 + t.fv * (v1 - v0);
}

struct FieldCache::Impl {
    mutable std::shared_mutex mutex;
    std::map<std::string, std::shared_ptr<const RemapField>> entries;
};

std::shared_ptr<FieldCache::Impl> FieldCache::make_impl() {
    return std::make_shared<Impl>();
}

namespace {

std::string cache_key(const MobiusTransform& f, const GridDims& dims) {
    auto put = [](std::string& s, double x) {
        if (x == 0.0) x = 0.0; // collapse -0.0
        uint64_t bits = std::bit_cast<uint64_t>(x);
        s.append(reinterpret_cast<const char*>(&bits), sizeof bits);
    };
    std::string key;
    key.reserve(8 * sizeof(double) + 2 * sizeof(int));
    for (std::complex<double> c : {f.a(), f.b(), f.c(), f.d()}) {
        put(key, c.real());
        put(key, c.imag());
    }
    key.append(reinterpret_cast<const char*>(&dims.w), sizeof dims.w);
    key.append(reinterpret_cast<const char*>(&dims.h), sizeof dims.h);
    return key;
}

} // namespace

std::shared_ptr<const RemapField> FieldCache::get_or_build(const MobiusTransform& f,
                                                           const GridDims& dims) {
    std::string key = cache_key(f, dims);
    {
        std::shared_lock lock(impl_->mutex);
        auto it = impl_->entries.find(key);
        if (it != impl_->entries.end()) return it->second;
    }
    auto built = std::make_shared<const RemapField>(build_remap_field(f, dims));
    std::unique_lock lock(impl_->mutex);
    auto [it, inserted] = impl_->entries.try_emplace(std::move(key), std::move(built));
    return it->second;
}

size_t FieldCache::size() const {
    std::shared_lock lock(impl_->mutex);
    return impl_->entries.size();
}

void FieldCache::clear() {
    std::unique_lock lock(impl_->mutex);
    impl_->entries.clear();
}

FieldCache& field_cache() {
    static FieldCache cache;
    return cache;
}

Grid transform_features(const Grid& fg, const MobiusTransform& f, Interp interp) {
    auto field = field_cache().get_or_build(f, fg.dims());
    return warp_image(fg, *field, interp);
}

Grid inverse_transform_features(const Grid& fg, const MobiusTransform& f, Interp interp) {
    return transform_features(fg, inverse(f), interp);
}

} // namespace sphereview
