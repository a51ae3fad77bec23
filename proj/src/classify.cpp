#include "bimodal/classify.hpp"

#include <algorithm>
#include <string>

namespace bimodal {
namespace {

using L = CanonicalLabel;
using std::string_view_literals::operator""sv;

constexpr std::array kParamsCF1 = {"trA1"sv, "detA1"sv, "trA2"sv, "detA2"sv, "b1"sv, "delta0"sv};
constexpr std::array kParamsCF2 = {"a1"sv, "a4"sv, "gamma1"sv, "b1"sv, "neg_delta1_over_delta12"sv};
constexpr std::array kParamsCF34 = {"a1"sv, "a4"sv, "gamma1"sv, "b1"sv};
constexpr std::array kParamsCF5 = {"a4"sv, "gamma1"sv, "b1"sv, "delta2_over_delta12"sv};
constexpr std::array kParamsCF5p = {"a1"sv, "a4"sv, "b1"sv, "neg_delta1_over_delta12"sv};
constexpr std::array kParamsCF67 = {"a4"sv, "gamma1"sv, "b1"sv};
constexpr std::array kParamsCF67p = {"a1"sv, "a4"sv, "b1"sv};
constexpr std::array kParamsCF8 = {"a4"sv, "gamma2_over_a2"sv, "b1"sv};
constexpr std::array kParamsCF9 = {"a4"sv, "gamma2_over_a2"sv, "b2_over_a2"sv};
constexpr std::array kParamsA4B1 = {"a4"sv, "b1"sv};
constexpr std::array kParamsCF11 = {"a4"sv, "b2_over_a2"sv};
constexpr std::array kParamsCF11p = {"a4"sv, "b2_over_gamma2"sv};
constexpr std::array kParamsA4 = {"a4"sv};

Triple make_planar(double a1, double a2, double a3, double a4, double g1, double g2,
                   double b1, double b2) {
  Eigen::Matrix2d A1, A2;
  A1 << a1, a3, a2, a4;
  A2 << g1, a3, g2, a4;
  return Triple(A1, A2, Eigen::Vector2d(b1, b2));
}

[[noreturn]] void guard_violation(CanonicalLabel label, const char* what) {
  throw Error(ErrorCode::GuardViolation,
              std::string(to_string(label)) + " requires " + what,
              "canonical_representative");
}

}  // namespace

std::string_view to_string(CanonicalLabel label) {
  switch (label) {
    case L::CF1: return "CF1";
    case L::CF2: return "CF2";
    case L::CF3: return "CF3";
    case L::CF4: return "CF4";
    case L::CF5: return "CF5";
    case L::CF5p: return "CF5p";
    case L::CF6: return "CF6";
    case L::CF6p: return "CF6p";
    case L::CF7: return "CF7";
    case L::CF7p: return "CF7p";
    case L::CF8: return "CF8";
    case L::CF9: return "CF9";
    case L::CF10: return "CF10";
    case L::CF10p: return "CF10p";
    case L::CF11: return "CF11";
    case L::CF11p: return "CF11p";
    case L::CF12: return "CF12";
    case L::CF13: return "CF13";
    case L::CF14: return "CF14";
  }
  return "?";
}

std::optional<CanonicalLabel> label_from_string(std::string_view name) {
  for (const auto label : kAllLabels) {
    if (to_string(label) == name) return label;
  }
  return std::nullopt;
}

std::string stratum_name(CanonicalLabel label) {
  std::string name(to_string(label));
  name.replace(0, 2, "E");
  if (name.back() == 'p') name.back() = '\'';
  return name;
}

std::span<const std::string_view> param_names(CanonicalLabel label) {
  switch (label) {
    case L::CF1: return kParamsCF1;
    case L::CF2: return kParamsCF2;
    case L::CF3:
    case L::CF4: return kParamsCF34;
    case L::CF5: return kParamsCF5;
    case L::CF5p: return kParamsCF5p;
    case L::CF6:
    case L::CF7: return kParamsCF67;
    case L::CF6p:
    case L::CF7p: return kParamsCF67p;
    case L::CF8: return kParamsCF8;
    case L::CF9: return kParamsCF9;
    case L::CF10:
    case L::CF10p:
    case L::CF12: return kParamsA4B1;
    case L::CF11: return kParamsCF11;
    case L::CF11p: return kParamsCF11p;
    case L::CF13:
    case L::CF14: return kParamsA4;
  }
  return {};
}

OrbitDimensions dimension_table(CanonicalLabel label) {
  switch (label) {
    case L::CF1: return {2, 8};
    case L::CF2: return {2, 7};
    case L::CF3: return {2, 6};
    case L::CF4: return {1, 5};
    case L::CF5:
    case L::CF5p: return {2, 6};
    case L::CF6:
    case L::CF6p: return {2, 5};
    case L::CF7:
    case L::CF7p: return {1, 4};
    case L::CF8: return {2, 5};
    case L::CF9: return {1, 4};
    case L::CF10:
    case L::CF10p: return {2, 4};
    case L::CF11:
    case L::CF11p: return {1, 3};
    case L::CF12: return {1, 3};
    case L::CF13: return {1, 1};
    case L::CF14: return {0, 1};
  }
  return {0, 0};
}

Triple canonical_representative(CanonicalLabel label, std::span<const double> params,
                                double eps) {
  const auto names = param_names(label);
  if (params.size() != names.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(to_string(label)) + " takes " + std::to_string(names.size()) +
                    " parameters, got " + std::to_string(params.size()),
                "canonical_representative");
  }
  if (!std::all_of(params.begin(), params.end(), [](double p) { return std::isfinite(p); })) {
    throw Error(ErrorCode::NonFiniteEntry, "non-finite canonical parameter",
                "canonical_representative");
  }
  double magnitude = 0.0;
  for (const double p : params) magnitude = std::max(magnitude, std::abs(p));
  const ZeroTest z(eps, 1.0 + magnitude);
  const auto& p = params;

  switch (label) {
    case L::CF1:
      return make_planar(p[0], -p[1], 1.0, 0.0, p[2], -p[3], p[4], p[5]);
    case L::CF2:
      if (z.equal(p[0], p[1]) || z.equal(p[2], p[1])) guard_violation(label, "a1 != a4 and gamma1 != a4");
      return make_planar(p[0], 0.0, 0.0, p[1], p[2], 1.0, p[3], p[4]);
    case L::CF3:
    case L::CF4:
      if (z.equal(p[0], p[1]) || z.equal(p[2], p[1])) guard_violation(label, "a1 != a4 and gamma1 != a4");
      return make_planar(p[0], 0.0, 0.0, p[1], p[2], 0.0, p[3], label == L::CF3 ? 1.0 : 0.0);
    case L::CF5:
      if (z.equal(p[1], p[0])) guard_violation(label, "gamma1 != a4");
      return make_planar(p[0], 1.0, 0.0, p[0], p[1], 0.0, p[2], p[3]);
    case L::CF5p:
      if (z.equal(p[0], p[1])) guard_violation(label, "a1 != a4");
      return make_planar(p[0], 0.0, 0.0, p[1], p[1], 1.0, p[2], p[3]);
    case L::CF6:
    case L::CF7:
      if (z.equal(p[1], p[0])) guard_violation(label, "gamma1 != a4");
      return make_planar(p[0], 0.0, 0.0, p[0], p[1], 0.0, p[2], label == L::CF6 ? 1.0 : 0.0);
    case L::CF6p:
    case L::CF7p:
      if (z.equal(p[0], p[1])) guard_violation(label, "a1 != a4");
      return make_planar(p[0], 0.0, 0.0, p[1], p[1], 0.0, p[2], label == L::CF6p ? 1.0 : 0.0);
    case L::CF8:
      if (z.zero(p[1]) || z.zero(p[2])) guard_violation(label, "gamma2/a2 != 0 and b1 != 0");
      return make_planar(p[0], 1.0, 0.0, p[0], p[0], p[1], p[2], 0.0);
    case L::CF9:
      if (z.zero(p[1])) guard_violation(label, "gamma2/a2 != 0");
      return make_planar(p[0], 1.0, 0.0, p[0], p[0], p[1], 0.0, p[2]);
    case L::CF10:
      if (z.zero(p[1])) guard_violation(label, "b1 != 0");
      return make_planar(p[0], 1.0, 0.0, p[0], p[0], 0.0, p[1], 0.0);
    case L::CF10p:
      if (z.zero(p[1])) guard_violation(label, "b1 != 0");
      return make_planar(p[0], 0.0, 0.0, p[0], p[0], 1.0, p[1], 0.0);
    case L::CF11:
      return make_planar(p[0], 1.0, 0.0, p[0], p[0], 0.0, 0.0, p[1]);
    case L::CF11p:
      return make_planar(p[0], 0.0, 0.0, p[0], p[0], 1.0, 0.0, p[1]);
    case L::CF12:
      if (z.zero(p[1])) guard_violation(label, "b1 != 0");
      return make_planar(p[0], 0.0, 0.0, p[0], p[0], 0.0, p[1], 0.0);
    case L::CF13:
      return make_planar(p[0], 0.0, 0.0, p[0], p[0], 0.0, 0.0, 1.0);
    case L::CF14:
      return make_planar(p[0], 0.0, 0.0, p[0], p[0], 0.0, 0.0, 0.0);
  }
  throw Error(ErrorCode::GuardViolation, "unknown label", "canonical_representative");
}

ClassificationResult classify(const Triple& x, double eps) {
  if (x.n() != 2) {
    throw Error(ErrorCode::WrongDimension, "classification needs n = 2", "classify");
  }
  const ZeroTest z(eps, x.scale());
  const auto inv = planar_invariants(x);
  const double a1 = x.a1(), a2 = x.a2(), a4 = x.a4();
  const double g1 = x.gamma1(), g2 = x.gamma2();
  const double b1 = x.b1(), b2 = x.b2();

  // Every branch picks S = [[1, 0], [u, t]]. With a3 = 0 the action reads
  //   A1 -> [[a1, 0], [(a2 + (a4 - a1) u) / t, a4]]
  //   A2 -> [[g1, 0], [(g2 + (a4 - g1) u) / t, a4]]
  //   B  -> [b1, (b2 - u b1) / t]
  // so u clears one subdiagonal and t normalizes the designated entry.
  CanonicalLabel label;
  std::vector<double> params;
  double u = 0.0;
  double t = 1.0;

  if (!z.zero(inv.a3)) {
    label = L::CF1;
    u = a4 / inv.a3;
    t = 1.0 / inv.a3;
    params = {inv.trA1, inv.detA1, inv.trA2, inv.detA2, b1, inv.delta0};
  } else {
    const double c1 = a4 - a1;
    const double c2 = a4 - g1;
    const bool a1_is_a4 = z.zero(c1);
    const bool g1_is_a4 = z.zero(c2);
    if (!a1_is_a4 && !g1_is_a4) {
      u = -a2 / c1;
      if (!z.zero(inv.delta12, 2)) {
        label = L::CF2;
        t = -inv.delta12 / c1;
        params = {a1, a4, g1, b1, -inv.delta1 / inv.delta12};
      } else if (!z.zero(inv.delta1, 2)) {
        label = L::CF3;
        t = inv.delta1 / c1;
        params = {a1, a4, g1, b1};
      } else {
        label = L::CF4;
        params = {a1, a4, g1, b1};
      }
    } else if (a1_is_a4 && !g1_is_a4) {
      u = -g2 / c2;
      if (!z.zero(a2)) {
        label = L::CF5;
        t = a2;
        params = {a4, g1, b1, inv.delta2 / inv.delta12};
      } else if (!z.zero(inv.delta2, 2)) {
        label = L::CF6;
        t = inv.delta2 / c2;
        params = {a4, g1, b1};
      } else {
        label = L::CF7;
        params = {a4, g1, b1};
      }
    } else if (!a1_is_a4 && g1_is_a4) {
      u = -a2 / c1;
      if (!z.zero(g2)) {
        label = L::CF5p;
        t = g2;
        params = {a1, a4, b1, -inv.delta1 / inv.delta12};
      } else if (!z.zero(inv.delta1, 2)) {
        label = L::CF6p;
        t = inv.delta1 / c1;
        params = {a1, a4, b1};
      } else {
        label = L::CF7p;
        params = {a1, a4, b1};
      }
    } else {
      const bool a2_zero = z.zero(a2);
      const bool g2_zero = z.zero(g2);
      const bool b1_zero = z.zero(b1);
      if (!b1_zero) u = b2 / b1;
      if (!a2_zero && !g2_zero) {
        t = a2;
        label = b1_zero ? L::CF9 : L::CF8;
        params = b1_zero ? std::vector{a4, g2 / a2, b2 / a2} : std::vector{a4, g2 / a2, b1};
      } else if (!a2_zero) {
        t = a2;
        label = b1_zero ? L::CF11 : L::CF10;
        params = b1_zero ? std::vector{a4, b2 / a2} : std::vector{a4, b1};
      } else if (!g2_zero) {
        t = g2;
        label = b1_zero ? L::CF11p : L::CF10p;
        params = b1_zero ? std::vector{a4, b2 / g2} : std::vector{a4, b1};
      } else if (!b1_zero) {
        label = L::CF12;
        params = {a4, b1};
      } else if (!z.zero(b2)) {
        label = L::CF13;
        t = b2;
        params = {a4};
      } else {
        label = L::CF14;
        params = {a4};
      }
    }
  }

  Triple canonical = canonical_representative(label, params, 0.0);
  Change S = Change::planar(u, t);
  const double residual = max_abs_difference(apply_change(S, x), canonical);
  const bool ill_conditioned = S.condition_number() > kIllConditioned;
  const auto dims = dimension_table(label);
  return {CanonicalForm{label, std::move(canonical), std::move(params), dims.orbit, dims.stratum},
          std::move(S), residual, ill_conditioned};
}

}  // namespace bimodal
