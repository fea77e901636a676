#include "dtar/nn/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace dtar::nn {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return json{{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j, const std::string& name) {
  const auto& shape = j.at("shape");
  const auto rows = shape.at(0).get<Eigen::Index>();
  const auto cols = shape.at(1).get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw CheckpointError("checkpoint entry '" + name + "' has inconsistent size");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data[k++].get<double>();
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::string& kind, const ParameterList& params, const Adam* adam,
                     const CheckpointInfo& info) {
  json root;
  root["format"] = "dtar-checkpoint";
  root["version"] = kCheckpointVersion;
  root["kind"] = kind;
  root["info"] = info;
  json p = json::object();
  for (const auto& np : params) p[np.name] = matrix_to_json(np.tensor.value());
  root["parameters"] = std::move(p);
  if (adam != nullptr) {
    json opt;
    opt["lr"] = adam->config().lr;
    opt["beta1"] = adam->config().beta1;
    opt["beta2"] = adam->config().beta2;
    opt["eps"] = adam->config().eps;
    opt["t"] = adam->steps();
    json st = json::object();
    for (const auto& np : params) {
      auto it = adam->state().find(np.name);
      if (it == adam->state().end()) continue;
      st[np.name] = {{"m", matrix_to_json(it->second.m)}, {"v", matrix_to_json(it->second.v)}};
    }
    opt["state"] = std::move(st);
    root["optimizer"] = std::move(opt);
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
    out << root.dump() << '\n';
    if (!out) throw CheckpointError("failed writing checkpoint '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot replace checkpoint '" + path + "': " + ec.message());
}

LoadedCheckpoint load_checkpoint(const std::string& path, ParameterList& params, Adam* adam,
                                 const std::string& expected_kind) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("checkpoint not found: '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw CheckpointError("malformed checkpoint '" + path + "': " + e.what());
  }
  try {
    if (root.value("format", "") != "dtar-checkpoint") throw CheckpointError("not a checkpoint: '" + path + "'");
    if (root.at("version").get<int>() != kCheckpointVersion) {
      throw CheckpointError("unsupported checkpoint version in '" + path + "'");
    }
    LoadedCheckpoint out;
    out.kind = root.at("kind").get<std::string>();
    if (!expected_kind.empty() && out.kind != expected_kind) {
      throw CheckpointError("checkpoint '" + path + "' holds '" + out.kind + "', expected '" + expected_kind + "'");
    }
    out.info = root.value("info", CheckpointInfo{});
    const auto& stored = root.at("parameters");
    for (auto& np : params) {
      if (!stored.contains(np.name)) throw CheckpointError("checkpoint lacks parameter '" + np.name + "'");
      Matrix m = matrix_from_json(stored.at(np.name), np.name);
      if (m.rows() != np.tensor.rows() || m.cols() != np.tensor.cols()) {
        throw CheckpointError("shape mismatch for parameter '" + np.name + "'");
      }
      np.tensor.mutable_value() = std::move(m);
    }
    if (adam != nullptr && root.contains("optimizer")) {
      const auto& opt = root.at("optimizer");
      *adam = Adam(AdamConfig{opt.at("lr").get<double>(), opt.at("beta1").get<double>(),
                              opt.at("beta2").get<double>(), opt.at("eps").get<double>()});
      adam->set_steps(opt.at("t").get<long long>());
      for (const auto& [name, st] : opt.at("state").items()) {
        adam->state()[name] = Adam::Moments{matrix_from_json(st.at("m"), name), matrix_from_json(st.at("v"), name)};
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw CheckpointError("malformed checkpoint '" + path + "': " + e.what());
  }
}

}  // namespace dtar::nn
