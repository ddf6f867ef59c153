#pragma once

#include <filesystem>
#include <variant>

#include "qosrec/mf.hpp"
#include "qosrec/nbmodel.hpp"

namespace qosrec {

// Flat key-value text format; doubles are written with 17 significant digits
// so reloaded models reproduce predictions bit-exactly.
void save_model(const NbModel& m, const std::filesystem::path& path);
void save_model(const MfModel& m, const std::filesystem::path& path);

using AnyModel = std::variant<NbModel, MfModel>;
AnyModel load_model(const std::filesystem::path& path);

}  // namespace qosrec
