#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optstop/model.hpp"

namespace optstop {

// Fully resolved parameter set.  When the dynamics were produced from a
// temperature description, the original description is kept so reports can
// echo it; when the dynamics were given directly, `temperature` is empty.
struct Parameters {
    std::optional<TemperatureModel> temperature;
    DamageDynamics dynamics;
    CostSchedule cost;
};

// Built-in defaults: slow warming with a calmer post-action trend, 10%
// proportional noise, damages normalized to 1 at the reference temperature,
// 5% discounting and a flat action cost of 60.
Parameters default_parameters();

// Reads an INI-style file and returns the resolved parameter set.
//
// Recognized sections and keys:
//   [temperature]  mu1 mu2 xi1 xi2 gamma c0 s0    (all required if present)
//   [damage]       alpha1 alpha2 sigma1 sigma2 s0 (all required if present)
//   [economy]      r
//   [cost]         k q
//
// Blank lines and lines starting with '#' or ';' are ignored, as is any
// trailing '#'/';' comment.  Unknown sections or keys and duplicate keys are
// errors.  A [damage] section overrides a [temperature] section; when both
// appear a note is pushed onto `warnings`.  Keys absent from the file keep
// their default values.
Parameters load_parameters(const std::string& path,
                           std::vector<std::string>& warnings);

}  // namespace optstop
