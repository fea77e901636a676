#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "dtar/nn/adam.hpp"
#include "dtar/nn/layers.hpp"

namespace dtar::nn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

using CheckpointInfo = std::map<std::string, std::string>;

/// JSON file: {"format", "version", "kind", "info", "parameters": {name:
/// {"shape", "data"}}, "optimizer"}. Values are written row-major with
/// round-trip precision. The file is replaced atomically.
void save_checkpoint(const std::string& path, const std::string& kind, const ParameterList& params,
                     const Adam* adam = nullptr, const CheckpointInfo& info = {});

struct LoadedCheckpoint {
  std::string kind;
  CheckpointInfo info;
};

/// Copies stored values into params by name. Missing names, shape
/// mismatches, wrong kind or version raise CheckpointError.
LoadedCheckpoint load_checkpoint(const std::string& path, ParameterList& params, Adam* adam = nullptr,
                                 const std::string& expected_kind = {});

}  // namespace dtar::nn
