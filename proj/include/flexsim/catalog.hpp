#pragma once

#include <filesystem>
#include <string_view>

#include "flexsim/io.hpp"

namespace flexsim {

/// Fixture file (without directory) holding the default scenario of a model.
std::string_view default_fixture_name(ModelKind kind);

/// Machine-readable catalog of the supported models: parameter schemas with
/// code defaults, controllers and their gains, compatible disturbances, fields,
/// and the default scenario loaded from `fixture_dir` (null when missing or
/// invalid). Unsupported systems are listed under "absent".
Json model_catalog(const std::filesystem::path& fixture_dir);

}  // namespace flexsim
