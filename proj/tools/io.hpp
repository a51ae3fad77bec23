#pragma once

#include <json.hpp>

#include "bimodal/core.hpp"
#include "bimodal/geometry.hpp"

namespace bimodal::io {

using json = nlohmann::ordered_json;

json matrix_to_json(const Eigen::MatrixXd& M);
json vector_to_json(const Eigen::VectorXd& v);

/// {"n": n, "A1": rows, "A2": rows, "B": entries}
json triple_to_json(const Triple& x);
json direction_to_json(const TripleDirection& v);

/// Accepts the triple object itself or any object holding one under
/// "triple". A2's shared columns may drift from A1's by at most `tol`
/// relative to the entry scale; they are then copied from A1.
Triple triple_from_json(const json& j, double tol = kDefaultEps);

}  // namespace bimodal::io
