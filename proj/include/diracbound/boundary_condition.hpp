#pragma once

#include <string>

namespace db {

enum class BCKind { None, MITBag, LocalChirality, APS, ModifiedAPS };

struct BoundaryCondition {
  BCKind kind = BCKind::None;
  int sign = +1;
  double b = 0.0;

  static BoundaryCondition none() { return {}; }
  static BoundaryCondition mit(int sign) { return {BCKind::MITBag, sign, 0.0}; }
  static BoundaryCondition local(int sign) { return {BCKind::LocalChirality, sign, 0.0}; }
  static BoundaryCondition aps(double b) { return {BCKind::APS, +1, b}; }
  static BoundaryCondition maps(double b, int sign) { return {BCKind::ModifiedAPS, sign, b}; }

  // True when the boundary problem is self-adjoint (real spectrum).
  bool realSpectrum() const;
  std::string describe() const;
};

void validate(const BoundaryCondition& bc);

}  // namespace db
