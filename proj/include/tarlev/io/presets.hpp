#pragma once

#include "tarlev/error.hpp"

#include <array>
#include <string>
#include <string_view>

namespace tarlev::io {

/// Built-in model fixtures; byte-identical to data/presets/<name>.json.
struct Preset {
    std::string_view name;
    std::string_view kind;  // "tar" or "bekk"
    std::string_view json;
};

inline constexpr std::array<Preset, 5> kPresets{{
    {"m1", "tar", R"json({
  "name": "m1",
  "description": "TAR(2;0,1) driven by a Gaussian AR(1) threshold process, one threshold at zero.",
  "l": 2,
  "thresholds": [0.0],
  "regimes": [
    {"order": 0, "intercept": 0.6, "ar": [], "h": 0.7},
    {"order": 1, "intercept": 0.2, "ar": [0.4], "h": 1.1}
  ],
  "z": {"kind": "gaussian_ar1", "phi": 0.5, "tau_var": 1.0}
}
)json"},
    {"m2", "tar", R"json({
  "name": "m2",
  "description": "TAR(2;2,3) driven by a Gaussian AR(1) threshold process, one threshold at zero.",
  "l": 2,
  "thresholds": [0.0],
  "regimes": [
    {"order": 2, "intercept": 2.9, "ar": [0.3, -0.4], "h": 1.5},
    {"order": 3, "intercept": 0.6, "ar": [-0.3, -0.1, 0.2], "h": 1.0}
  ],
  "z": {"kind": "gaussian_ar1", "phi": 0.4, "tau_var": 0.5}
}
)json"},
    {"m3", "tar", R"json({
  "name": "m3",
  "description": "TAR(3;3,1,3) driven by a Gaussian AR(1) threshold process, thresholds at -1 and 1.",
  "l": 3,
  "thresholds": [-1.0, 1.0],
  "regimes": [
    {"order": 3, "intercept": -1.6, "ar": [0.2, -0.6, -0.1], "h": 3.0},
    {"order": 1, "intercept": 0.9, "ar": [0.5], "h": 1.0},
    {"order": 3, "intercept": 4.0, "ar": [-0.7, -0.2, 0.1], "h": 2.0}
  ],
  "z": {"kind": "gaussian_ar1", "phi": 0.6, "tau_var": 1.0}
}
)json"},
    {"bovespa-tar", "tar", R"json({
  "name": "bovespa-tar",
  "description": "TAR(2;0,6) for daily Bovespa log returns with the lagged S&P 500 return as threshold variable; noise given as variances, equal regime probabilities.",
  "l": 2,
  "thresholds": [0.0007],
  "regimes": [
    {"order": 0, "intercept": -0.0059, "ar": [], "h2": 1.7418e-4},
    {"order": 6, "intercept": 0.0063, "ar": [-0.0478, -0.0533, -0.0779, -0.0171, -0.0508, -0.0653], "h2": 1.6405e-4}
  ],
  "z": {"kind": "gaussian_ar1", "phi": 0.0, "tau_var": 1.0},
  "regime_probabilities": [0.5, 0.5]
}
)json"},
    {"bovespa-bekk", "bekk", R"json({
  "name": "bovespa-bekk",
  "description": "VAR(1)-asymmetric BEKK(1,1) for (Bovespa, S&P 500) daily log returns, as estimated without the identification sign convention.",
  "p": 1,
  "mu": [-2.4820e-5, 0.0004],
  "gamma": [[[-0.0142, 0.0425], [0.0449, -0.0578]]],
  "C": [[0.0024, 0.0008], [0.0, -0.0012]],
  "Lambda": [[-0.2324, 0.0155], [0.1746, 0.0062]],
  "Theta": [[0.9440, 0.0018], [0.0002, 0.9334]],
  "D": [[0.2114, 0.0182], [0.1688, 0.4363]]
}
)json"},
}};

inline const Preset& find_preset(std::string_view name) {
    for (const auto& p : kPresets)
        if (p.name == name) return p;
    throw Error(ErrorCode::Configuration, "unknown preset '" + std::string(name) + "'");
}

}  // namespace tarlev::io
