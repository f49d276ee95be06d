#include "negmix/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace negmix {

namespace {

Json complex_to_json(const Complex& z) {
  if (z.imag() == 0.0) return z.real();
  return Json::array({z.real(), z.imag()});
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  throw std::invalid_argument("expected a number or [re, im] pair");
}

Eigen::VectorXd vector_from_json(const Json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

Json tensor_to_json(const SymTensor3& t) {
  const int n = t.dim();
  Json entries = Json::array();
  for (int i = 0; i < n; ++i) {
    Json plane = Json::array();
    for (int j = 0; j < n; ++j) {
      Json row = Json::array();
      for (int k = 0; k < n; ++k) row.push_back(complex_to_json(t(i, j, k)));
      plane.push_back(std::move(row));
    }
    entries.push_back(std::move(plane));
  }
  return Json{{"dim", n}, {"entries", std::move(entries)}};
}

SymTensor3 tensor_from_json(const Json& j) {
  const int n = j.at("dim").get<int>();
  const Json& entries = j.at("entries");
  if (static_cast<int>(entries.size()) != n) {
    throw std::invalid_argument("tensor entries do not match dim");
  }
  Tensor3 raw(n, n, n);
  for (int i = 0; i < n; ++i) {
    const Json& plane = entries[i];
    if (static_cast<int>(plane.size()) != n) {
      throw std::invalid_argument("tensor entries do not match dim");
    }
    for (int jj = 0; jj < n; ++jj) {
      const Json& row = plane[jj];
      if (static_cast<int>(row.size()) != n) {
        throw std::invalid_argument("tensor entries do not match dim");
      }
      for (int k = 0; k < n; ++k) raw(i, jj, k) = complex_from_json(row[k]);
    }
  }
  return SymTensor3::from_symmetrized(raw);
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json entries = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    entries.push_back(std::move(row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const Json& entries = j.at("entries");
  if (static_cast<int>(entries.size()) != rows) {
    throw std::invalid_argument("matrix entries do not match rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(entries[i].size()) != cols) {
      throw std::invalid_argument("matrix entries do not match cols");
    }
    for (int k = 0; k < cols; ++k) m(i, k) = entries[i][k].get<double>();
  }
  return m;
}

Json model_to_json(const SphericalMixture& m) {
  Json means = Json::array();
  for (int i = 0; i < m.k(); ++i) {
    means.push_back(vector_to_json(m.means.col(i)));
  }
  return Json{{"k", m.k()},
              {"weights", vector_to_json(m.weights)},
              {"means", std::move(means)},
              {"variances", vector_to_json(m.variances)}};
}

SphericalMixture model_from_json(const Json& j) {
  SphericalMixture m;
  const int k = j.at("k").get<int>();
  m.weights = vector_from_json(j.at("weights"));
  m.variances = vector_from_json(j.at("variances"));
  const Json& means = j.at("means");
  if (static_cast<int>(means.size()) != k || m.weights.size() != k ||
      m.variances.size() != k) {
    throw std::invalid_argument("model fields do not match k");
  }
  const int n = k > 0 ? static_cast<int>(means[0].size()) : 0;
  m.means.resize(n, k);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(means[i].size()) != n) {
      throw std::invalid_argument("model means have inconsistent dimensions");
    }
    m.means.col(i) = vector_from_json(means[i]);
  }
  return m;
}

Json wfa_to_json(const LinearRep& rep) {
  Json matrices = Json::object();
  for (std::size_t s = 0; s < rep.alphabet.size(); ++s) {
    Json rows = Json::array();
    for (int i = 0; i < rep.dim; ++i) {
      Json row = Json::array();
      for (int j = 0; j < rep.dim; ++j) row.push_back(rep.matrices[s](i, j));
      rows.push_back(std::move(row));
    }
    matrices[rep.alphabet[s]] = std::move(rows);
  }
  return Json{{"alphabet", rep.alphabet},
              {"dim", rep.dim},
              {"iota", vector_to_json(rep.iota)},
              {"tau", vector_to_json(rep.tau)},
              {"matrices", std::move(matrices)}};
}

LinearRep wfa_from_json(const Json& j) {
  LinearRep rep;
  rep.alphabet = j.at("alphabet").get<std::vector<std::string>>();
  rep.dim = j.at("dim").get<int>();
  rep.iota = vector_from_json(j.at("iota"));
  rep.tau = vector_from_json(j.at("tau"));
  if (rep.iota.size() != rep.dim || rep.tau.size() != rep.dim) {
    throw std::invalid_argument("wfa iota/tau do not match dim");
  }
  const Json& matrices = j.at("matrices");
  for (const std::string& symbol : rep.alphabet) {
    if (!matrices.contains(symbol)) {
      throw std::invalid_argument("wfa missing matrix for symbol " + symbol);
    }
    const Json& rows = matrices.at(symbol);
    if (static_cast<int>(rows.size()) != rep.dim) {
      throw std::invalid_argument("wfa matrix rows do not match dim");
    }
    Eigen::MatrixXd m(rep.dim, rep.dim);
    for (int i = 0; i < rep.dim; ++i) {
      if (static_cast<int>(rows[i].size()) != rep.dim) {
        throw std::invalid_argument("wfa matrix cols do not match dim");
      }
      for (int c = 0; c < rep.dim; ++c) m(i, c) = rows[i][c].get<double>();
    }
    rep.matrices.push_back(std::move(m));
  }
  return rep;
}

Json pa_mixture_to_json(const PaMixture& mix) {
  Json out{{"s_plus", mix.s_plus},
           {"s_minus", mix.s_minus},
           {"pa_plus", wfa_to_json(mix.pa_plus.rep)}};
  out["pa_minus"] = mix.pa_minus ? wfa_to_json(mix.pa_minus->rep) : Json(nullptr);
  return out;
}

PaMixture pa_mixture_from_json(const Json& j) {
  PaMixture mix;
  mix.s_plus = j.at("s_plus").get<double>();
  mix.s_minus = j.at("s_minus").get<double>();
  mix.pa_plus = make_prob_automaton(wfa_from_json(j.at("pa_plus")));
  if (!j.at("pa_minus").is_null()) {
    mix.pa_minus = make_prob_automaton(wfa_from_json(j.at("pa_minus")));
  }
  return mix;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const Eigen::MatrixXd& data,
               const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out << ',';
      out << header[i];
    }
    out << '\n';
  }
  for (int i = 0; i < data.rows(); ++i) {
    for (int j = 0; j < data.cols(); ++j) {
      if (j) out << ',';
      out << format_double(data(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Eigen::MatrixXd read_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && has_header) {
      first = false;
      continue;
    }
    first = false;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad CSV value '" + cell + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("ragged CSV rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("empty CSV: " + path);
  Eigen::MatrixXd data(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      data(i, j) = rows[i][j];
    }
  }
  return data;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw std::invalid_argument("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace negmix
