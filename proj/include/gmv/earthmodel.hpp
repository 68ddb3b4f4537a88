#pragma once

#include "gmv/error.hpp"
#include "gmv/source.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gmv {

struct CrustalLayer {
    double depth_top = 0.0; // m
    double rho = 0.0;       // kg/m^3
    double vp = 0.0;        // m/s
    double vs = 0.0;        // m/s
    double qp = 0.0;
    double qs = 0.0;

    bool operator==(const CrustalLayer&) const = default;
};

/// Layer stack ordered by strictly increasing top depth, first at 0 m.
/// Q values are carried but no attenuation is applied anywhere.
class CrustalModel {
public:
    explicit CrustalModel(std::vector<CrustalLayer> layers) : layers_(std::move(layers))
    {
        detail::require(!layers_.empty(), ErrorCode::invalid_argument, "crustal model has no layers");
        detail::require(layers_.front().depth_top == 0.0, ErrorCode::invalid_argument,
                        "first crustal layer must start at 0 m");
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const auto& l = layers_[i];
            detail::require(l.vp > l.vs && l.vs > 0.0, ErrorCode::invalid_argument, "layer needs vp > vs > 0");
            detail::require(l.rho > 0.0 && l.qp > 0.0 && l.qs > 0.0, ErrorCode::invalid_argument,
                            "layer needs positive density and Q");
            if (i > 0)
                detail::require(layers_[i - 1].depth_top < l.depth_top, ErrorCode::invalid_argument,
                                "layer top depths must be strictly increasing");
        }
    }

    // Regional crustal bedrock of the Cruas-Meysse area (Causse et al., 2021).
    // The low-velocity row at 1197 m is kept as published.
    static CrustalModel defaults()
    {
        return CrustalModel({
            {0.0, 2500.0, 3366.0, 2047.0, 400.0, 180.0},
            {628.0, 2600.0, 5995.0, 3645.0, 400.0, 180.0},
            {1197.0, 2300.0, 1967.0, 1200.0, 400.0, 180.0},
            {1416.0, 2500.0, 3831.0, 2291.0, 400.0, 180.0},
            {2026.0, 2500.0, 3908.0, 2314.0, 400.0, 180.0},
            {2194.0, 2600.0, 5819.0, 3457.0, 400.0, 180.0},
            {5956.0, 2600.0, 5951.0, 3616.0, 400.0, 180.0},
        });
    }

    const std::vector<CrustalLayer>& layers() const { return layers_; }

    const CrustalLayer& layer_at(double depth) const
    {
        detail::require(depth >= 0.0, ErrorCode::invalid_argument, "depth must be non-negative");
        const auto it = std::upper_bound(layers_.begin(), layers_.end(), depth,
                                         [](double d, const CrustalLayer& l) { return d < l.depth_top; });
        return *(it - 1);
    }

    Medium medium_at(double depth) const
    {
        const auto& l = layer_at(depth);
        return {l.rho, l.vp, l.vs};
    }

private:
    std::vector<CrustalLayer> layers_;
};

inline const CrustalLayer& layer_at(const CrustalModel& model, double depth) { return model.layer_at(depth); }

/// Sediment velocity gradient of the form v(z) = v0 + c * z^exponent.
struct BasinProfile {
    double vs0 = 300.0;
    double vs_coef = 53.7;
    double vp0 = 550.0;
    double vp_coef = 78.3;
    double exponent = 0.5;

    double vs(double z) const
    {
        detail::require(z >= 0.0, ErrorCode::invalid_argument, "depth must be non-negative");
        return vs0 + vs_coef * power(z);
    }
    double vp(double z) const
    {
        detail::require(z >= 0.0, ErrorCode::invalid_argument, "depth must be non-negative");
        return vp0 + vp_coef * power(z);
    }

private:
    double power(double z) const { return exponent == 0.5 ? std::sqrt(z) : std::pow(z, exponent); }
};

inline double vs_basin(double z) { return BasinProfile{}.vs(z); }
inline double vp_basin(double z) { return BasinProfile{}.vp(z); }

} // namespace gmv
