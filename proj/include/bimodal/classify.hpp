#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bimodal/core.hpp"

namespace bimodal {

/// Canonical types of planar triples. A trailing `p` marks the primed forms,
/// which swap the roles of the two modes.
enum class CanonicalLabel {
  CF1, CF2, CF3, CF4, CF5, CF5p, CF6, CF6p, CF7, CF7p,
  CF8, CF9, CF10, CF10p, CF11, CF11p, CF12, CF13, CF14,
};

inline constexpr std::array<CanonicalLabel, 19> kAllLabels = {
    CanonicalLabel::CF1,  CanonicalLabel::CF2,   CanonicalLabel::CF3,  CanonicalLabel::CF4,
    CanonicalLabel::CF5,  CanonicalLabel::CF5p,  CanonicalLabel::CF6,  CanonicalLabel::CF6p,
    CanonicalLabel::CF7,  CanonicalLabel::CF7p,  CanonicalLabel::CF8,  CanonicalLabel::CF9,
    CanonicalLabel::CF10, CanonicalLabel::CF10p, CanonicalLabel::CF11, CanonicalLabel::CF11p,
    CanonicalLabel::CF12, CanonicalLabel::CF13,  CanonicalLabel::CF14,
};

std::string_view to_string(CanonicalLabel label);
std::optional<CanonicalLabel> label_from_string(std::string_view name);

/// Stratum name used in bifurcation diagrams: CF5p -> "E5'".
std::string stratum_name(CanonicalLabel label);

/// Names of the canonical parameters of `label`, in the order used by
/// CanonicalForm::params and canonical_representative.
std::span<const std::string_view> param_names(CanonicalLabel label);

struct OrbitDimensions {
  int orbit;
  int stratum;
  friend bool operator==(const OrbitDimensions&, const OrbitDimensions&) = default;
};

OrbitDimensions dimension_table(CanonicalLabel label);

struct CanonicalForm {
  CanonicalLabel label;
  Triple triple;
  std::vector<double> params;
  int orbit_dim;
  int stratum_dim;
};

struct ClassificationResult {
  CanonicalForm form;
  Change S;               // apply_change(S, input) reproduces form.triple
  double residual;        // max entrywise deviation of that reproduction
  bool ill_conditioned;   // cond(S) > kIllConditioned
};

inline constexpr double kIllConditioned = 1e12;

/// Decides the canonical type of a planar triple and builds the admissible
/// change reducing it. Guard quantities inside the tolerance band count as
/// zero, which resolves ties toward the less generic type.
ClassificationResult classify(const Triple& x, double eps = kDefaultEps);

/// Assembles the displayed canonical triple for `label`. Throws
/// GuardViolation when the parameters contradict the label's conditions.
Triple canonical_representative(CanonicalLabel label, std::span<const double> params,
                                double eps = kDefaultEps);

}  // namespace bimodal
