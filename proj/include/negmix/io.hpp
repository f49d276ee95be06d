#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "negmix/spherical_mixture.hpp"
#include "negmix/tensor.hpp"
#include "negmix/wfa.hpp"

namespace negmix {

using Json = nlohmann::json;

// Complex values serialize as [re, im]; real values may be plain numbers
// and readers accept both.

/// {"dim": n, "entries": nested n x n x n arrays}
Json tensor_to_json(const SymTensor3& t);
SymTensor3 tensor_from_json(const Json& j);

/// {"rows": r, "cols": c, "entries": nested arrays} (real matrices)
Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

/// {"k": int, "weights": [...], "means": [[...], ...], "variances": [...]}
Json model_to_json(const SphericalMixture& m);
SphericalMixture model_from_json(const Json& j);

/// {"alphabet": [...], "dim": n, "iota": [...], "tau": [...],
///  "matrices": {"a": [[...], ...], ...}}
Json wfa_to_json(const LinearRep& rep);
LinearRep wfa_from_json(const Json& j);

/// {"s_plus": ..., "s_minus": ..., "pa_plus": <wfa>, "pa_minus": <wfa>|null}
Json pa_mixture_to_json(const PaMixture& mix);
PaMixture pa_mixture_from_json(const Json& j);

/// Shortest round-trip decimal form of a double (used for CSV cells so
/// identical runs give byte-identical files).
std::string format_double(double v);

/// Dataset CSV: one sample per row, no header unless one is given.
void write_csv(const std::string& path, const Eigen::MatrixXd& data,
               const std::vector<std::string>& header = {});
Eigen::MatrixXd read_csv(const std::string& path, bool has_header = false);

Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& j);

}  // namespace negmix
