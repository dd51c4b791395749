#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "rds/functional.hpp"
#include "rds/linalg.hpp"

namespace rds {

// LTI base system with one delay, linear reset map, hyperplane reset set.
struct LTIResetSpec {
    Mat A;
    Mat Ad;
    Mat Ar;
    Vec C;
    double h = 0.0;

    int dim() const { return A.rows; }
    void validate() const;
};

struct StabilityCertificate {
    SymMatrix P;
    SymMatrix Q;
    Mat theta;           // orthonormal null-space basis of C, n x (n-1)
    double flow_margin;  // -lambda_max(M) > 0
    double jump_margin;  // -lambda_max(theta'(Ar'PAr - P)theta) >= 0
    double u_coeff;      // lambda_min(P):      u(s) = u_coeff * s^2
    double v_coeff;      // lM(P) + h lM(Q):    v(s) = v_coeff * s^2
    double w_coeff;      // lambda_min(-M):     w(s) = w_coeff * s^2
    double h = 0.0;
};

// [[A'P + PA + Q, P Ad], [Ad' P, -Q]], symmetrized.
SymMatrix build_flow_lmi(const LTIResetSpec& spec, const SymMatrix& P, const SymMatrix& Q);

// theta' (Ar' P Ar - P) theta on the reset surface; order n-1 (0 for n=1).
SymMatrix build_jump_block(const LTIResetSpec& spec, const SymMatrix& P);

struct CertificateVerdict {
    bool pass = false;
    std::string failed_condition;  // "P", "Q", "flow-lmi", "jump-condition"
    double lambda_flow = 0.0;      // lambda_max of the flow LMI block
    double lambda_jump = 0.0;      // lambda_max of the jump block (0 when vacuous)
    double lambda_min_P = 0.0;
    double lambda_min_Q = 0.0;
    std::optional<StabilityCertificate> certificate;
};

// P > 0, Q > 0, flow LMI < 0 at the stated margin, jump block <= 0
// (1e-10 slack). On pass the verdict carries the full certificate.
CertificateVerdict verify(const LTIResetSpec& spec, const SymMatrix& P, const SymMatrix& Q,
                          double margin);

struct SearchResult {
    bool feasible = false;
    std::optional<StabilityCertificate> certificate;
    double best_objective = 0.0;
    std::string blocking_condition;  // worst condition at the best iterate
    int iterations = 0;
};

// Projected subgradient descent on the max of the extreme eigenvalues of
// the two LMI blocks over symmetric (P, Q), eigenvalue-floored after each
// step. Deterministic given the seed; restarts perturb the identity start.
SearchResult search(const LTIResetSpec& spec, double margin, int budget, unsigned seed = 0);

LKFunctional certificate_to_functional(const StabilityCertificate& cert, const LTIResetSpec& spec);

void write_certificate(std::ostream& os, const StabilityCertificate& cert);
StabilityCertificate read_certificate(std::istream& is);

}  // namespace rds
