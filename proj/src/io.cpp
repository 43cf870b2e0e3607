#include "hrrt/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hrrt {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("rename failed: " + tmp + " -> " + path);
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  return out;
}

std::string vector_json(const VectorXd& v) {
  std::string out = "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  out += "]";
  return out;
}

}  // namespace

std::string tree_to_json(const Tree& tree, const ScenarioModel& model, const PlannerParams& params,
                         const std::string& scenario_hash) {
  std::string out = "{\n  \"metadata\": {\n";
  out += "    \"scenario\": \"" + json_escape(model.name()) + "\",\n";
  out += "    \"scenario_hash\": \"" + json_escape(scenario_hash) + "\",\n";
  out += "    \"seed\": " + std::to_string(params.rng_seed) + ",\n";
  out += "    \"params\": {\"epsilon\": " + format_double(params.epsilon) +
         ", \"lambda\": " + format_double(params.lambda) + ", \"beta\": " + format_double(params.beta) +
         ", \"max_nodes\": " + std::to_string(params.max_nodes) + ", \"eta\": " + format_double(params.eta) +
         ", \"dt\": " + format_double(params.dt) + "}\n";
  out += "  },\n  \"nodes\": [\n";
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    out += "    {\"id\": " + std::to_string(n.id);
    out += ", \"parent\": " + (n.parent < 0 ? std::string("null") : std::to_string(n.parent));
    out += ", \"z\": " + vector_json(n.eq.point.z);
    out += ", \"u\": " + vector_json(n.eq.point.u);
    out += ", \"W\": " + format_double(n.eq.W);
    out += ", \"det_hzz\": " + format_double(n.eq.hess_det);
    out += std::string(", \"dead_end\": ") + (n.dead_end ? "true" : "false");
    out += ", \"edge_phi\": " + format_double(n.edge_phi);
    out += ", \"cumulative_phi\": " + format_double(n.cumulative_phi);
    out += "}";
    if (i + 1 < tree.nodes.size()) out += ",";
    out += "\n";
  }
  out += "  ]\n}\n";
  return out;
}

std::string path_to_csv(const Tree& tree, const Path& path, const ScenarioModel& model) {
  std::string out = "t";
  for (const auto& n : model.control_names()) out += "," + n;
  for (const auto& n : model.state_names()) out += "," + n;
  out += ",phi,W";
  for (const auto& n : model.control_names()) out += ",f_ctrl_" + n;
  out += "\n";

  auto row = [&](double t, const VectorXd& z, const VectorXd& u, double phi) {
    out += format_double(t);
    for (int i = 0; i < u.size(); ++i) out += "," + format_double(u[i]);
    for (int i = 0; i < z.size(); ++i) out += "," + format_double(z[i]);
    out += "," + format_double(phi);
    out += "," + format_double(model.energy(z, u));
    const VectorXd f = -model.control_gradient({z, u});
    for (int i = 0; i < f.size(); ++i) out += "," + format_double(f[i]);
    out += "\n";
  };

  double t_offset = 0.0, phi_offset = 0.0;
  bool first = true;
  for (const PathStep& step : path.steps) {
    if (step.trace_index < 0) {
      const TreeNode& node = tree.nodes[step.node_id];
      row(0.0, node.eq.point.z, node.eq.point.u, 0.0);
      first = false;
      continue;
    }
    const TrackTrace& trace = tree.traces[step.trace_index];
    for (size_t i = first ? 0 : 1; i < trace.samples.size(); ++i) {
      const TrackSample& s = trace.samples[i];
      row(t_offset + s.t, s.z, s.u, phi_offset + s.phi);
    }
    first = false;
    if (!trace.samples.empty()) {
      t_offset += trace.samples.back().t;
      phi_offset += trace.samples.back().phi;
    }
  }
  return out;
}

std::string manifest_to_json(const std::string& command, const std::string& config_file, std::uint64_t seed,
                             const json& overrides, double duration_seconds,
                             const std::vector<ManifestEntry>& outputs) {
  std::string out = "{\n";
  out += "  \"tool\": \"hapticrrt 0.1.0\",\n";
  out += "  \"command\": \"" + json_escape(command) + "\",\n";
  out += "  \"config\": \"" + json_escape(config_file) + "\",\n";
  out += "  \"seed\": " + std::to_string(seed) + ",\n";
  out += "  \"overrides\": " + overrides.dump() + ",\n";
  out += "  \"duration_seconds\": " + format_double(duration_seconds) + ",\n";
  out += "  \"outputs\": {";
  for (size_t i = 0; i < outputs.size(); ++i) {
    if (i) out += ",";
    out += "\n    \"" + json_escape(outputs[i].file) + "\": \"" + outputs[i].sha256 + "\"";
  }
  out += outputs.empty() ? "}\n" : "\n  }\n";
  out += "}\n";
  return out;
}

}  // namespace hrrt
