#pragma once

#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "pwca/dataio.hpp"
#include "pwca/numfmt.hpp"
#include "pwca/pwca.hpp"

namespace pwca {

namespace detail {

inline void json_escape_into(std::ostringstream& os, const std::string& s) {
  os << '"';
  for (char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      default: os << c;
    }
  }
  os << '"';
}

} // namespace detail

// Canonical model document: fixed field order, 17-significant-digit reals.
// Written by hand so that identical models serialize byte-identically.
inline std::string model_to_json(const PwcaModel& model) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"method\": \"" << method_name(model.method) << "\",\n";
  os << "  \"s\": " << model.s << ",\n";
  os << "  \"l\": " << model.l << ",\n";
  os << "  \"tau\": " << fmt17(model.tau) << ",\n";
  os << "  \"k\": " << model.k << ",\n";
  os << "  \"gammas\": [";
  for (Index j = 0; j < model.k; ++j) os << (j ? ", " : "") << fmt17(model.gammas(j));
  os << "],\n";
  os << "  \"duals\": [\n";
  for (int v = 0; v < model.s; ++v) {
    const Eigen::MatrixXd& block = model.duals[static_cast<std::size_t>(v)];
    os << "    [";
    for (Index i = 0; i < model.l; ++i) {
      os << (i ? ",\n     [" : "[");
      for (Index j = 0; j < model.k; ++j) os << (j ? ", " : "") << fmt17(block(i, j));
      os << "]";
    }
    os << "]" << (v + 1 < model.s ? "," : "") << "\n";
  }
  os << "  ],\n";
  os << "  \"kernel_spec\": {\"kind\": \"" << kernel_kind_name(model.kernel_spec.kind)
     << "\", \"bandwidth\": " << fmt17(model.kernel_spec.bandwidth)
     << ", \"center\": " << (model.kernel_spec.center ? "true" : "false") << "},\n";
  os << "  \"train_view_paths\": [";
  for (std::size_t i = 0; i < model.train_view_paths.size(); ++i) {
    if (i) os << ", ";
    detail::json_escape_into(os, model.train_view_paths[i]);
  }
  os << "]\n";
  os << "}\n";
  return os.str();
}

inline void save_model(const PwcaModel& model, const std::string& path) {
  write_text_file(path, model_to_json(model));
}

// Loads a model document; training views are re-read from the stored paths
// (resolved relative to the working directory) when present.
inline PwcaModel load_model(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model " + path + ": " + e.what());
  }
  try {
    PwcaModel m;
    m.method = method_from_name(doc.at("method").get<std::string>());
    m.s = doc.at("s").get<int>();
    m.l = doc.at("l").get<Index>();
    m.tau = doc.at("tau").get<double>();
    m.k = doc.at("k").get<Index>();
    const auto& gj = doc.at("gammas");
    if (static_cast<Index>(gj.size()) != m.k) throw ParseError("model: gammas length != k");
    m.gammas.resize(m.k);
    for (Index j = 0; j < m.k; ++j) m.gammas(j) = gj[static_cast<std::size_t>(j)].get<double>();
    const auto& dj = doc.at("duals");
    if (static_cast<int>(dj.size()) != m.s) throw ParseError("model: duals block count != s");
    for (int v = 0; v < m.s; ++v) {
      const auto& bj = dj[static_cast<std::size_t>(v)];
      if (static_cast<Index>(bj.size()) != m.l) throw ParseError("model: dual block rows != l");
      Eigen::MatrixXd block(m.l, m.k);
      for (Index i = 0; i < m.l; ++i) {
        const auto& row = bj[static_cast<std::size_t>(i)];
        if (static_cast<Index>(row.size()) != m.k) throw ParseError("model: dual row length != k");
        for (Index j = 0; j < m.k; ++j) block(i, j) = row[static_cast<std::size_t>(j)].get<double>();
      }
      m.duals.push_back(std::move(block));
    }
    const auto& ks = doc.at("kernel_spec");
    m.kernel_spec.kind = kernel_kind_from_name(ks.at("kind").get<std::string>());
    m.kernel_spec.bandwidth = ks.at("bandwidth").get<double>();
    m.kernel_spec.center = ks.at("center").get<bool>();
    for (const auto& p : doc.at("train_view_paths"))
      m.train_view_paths.push_back(p.get<std::string>());
    for (const auto& p : m.train_view_paths) m.train_views.push_back(load_view(p));
    for (const auto& X : m.train_views)
      if (X.rows() != m.l) throw DimensionMismatch("model: training view rows != l");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model " + path + ": " + e.what());
  }
}

} // namespace pwca
