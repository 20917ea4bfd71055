#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "nehari/energy.hpp"
#include "nehari/radial.hpp"

namespace nehari {

/// Schwarz rearrangement of |u| on the same grid.
struct RearrangedField {
  RadialField field;
  bool monotone_certificate = false;  ///< nonnegative and nonincreasing in k
};

/// Sorts the (|u_k|, w_k) pairs by decreasing value and reads the resulting
/// decreasing distribution back at the centre of every grid cell's volume
/// slot, filling from r = 0 outward. Equimeasurable with |u| up to one cell.
RearrangedField rearrange(const RadialField& u);

FieldVector rearrange(const FieldVector& u);

bool is_nonincreasing(const RadialField& u);

struct AuditTolerance {
  double quad = 1e-6;           ///< relative quadrature tolerance
  double gradient_band = 1.0;   ///< C in the C*h band for gradient/product rows
};

enum class AuditKind {
  LpPreserve,       // |u*|_p^p vs |u|_p^p, equality up to quantization
  PolyaSzego,       // |grad u*|^2 <= |grad |u||^2
  AbsGradient,      // |grad |u||^2 <= |grad u|^2
  HardyLittlewood,  // |u_i u_j|_q^q <= |u_i* u_j*|_q^q
  TauComparison,    // tau(u*) <= tau(u)
};

std::string to_string(AuditKind kind);

struct AuditRow {
  AuditKind kind;
  int i = -1;
  int j = -1;
  double p = 0.0;      ///< exponent, where meaningful
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  ///< rhs - lhs (negative slack on an equality row is fine)
  double tolerance = 0.0;
  bool ok = true;

  /// Excess of lhs over rhs relative to rhs, clipped at 0.
  double relative_violation() const;
};

struct AuditReport {
  std::vector<AuditRow> rows;

  bool all_ok() const;
  std::size_t violations() const;
  double max_relative_violation(AuditKind kind) const;
};

/// Compares u against its rearrangement for every inequality used when
/// symmetrizing a minimizing sequence. The optional `corrupt` factor
/// multiplies the rearranged fields (fault-injection hook for tests).
AuditReport audit_inequalities(const Params& p, const FieldVector& u,
                               const AuditTolerance& tol = {}, double corrupt = 1.0);

void write_audit_csv(std::ostream& os, const AuditReport& report);

}  // namespace nehari
