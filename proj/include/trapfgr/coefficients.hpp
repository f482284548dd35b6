#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "trapfgr/resolvent.hpp"
#include "trapfgr/series.hpp"

namespace tfgr {

// Complex value plus linear dependence on named real unknowns.
struct TaggedScalar {
    cplx value{};
    std::map<std::string, cplx> tags;

    TaggedScalar() = default;
    TaggedScalar(cplx v) : value(v) {}
    TaggedScalar(double v) : value(v) {}

    TaggedScalar operator+(const TaggedScalar& o) const;
    TaggedScalar operator-(const TaggedScalar& o) const;
    TaggedScalar operator-() const { return *this * cplx(-1.0); }
    TaggedScalar operator*(cplx a) const;
    TaggedScalar& operator+=(const TaggedScalar& o) { return *this = *this + o; }
    TaggedScalar with_tag(const std::string& name, cplx coeff) const;

    // largest |Re coefficient| over the tags
    double real_leak() const;
};
inline TaggedScalar operator*(cplx a, const TaggedScalar& t) { return t * a; }

using Index2 = std::pair<int, int>;

struct CoefficientTable {
    double sign = -1.0;  // forcing sign; -1 is the physical expansion of the cubic term
    std::map<std::tuple<int, int, int>, TaggedScalar> P;  // (k, m, n)
    std::map<Index2, PairField> R;
    std::map<Index2, PairField> Nvec;
    std::map<Index2, cplx> Z;
    std::map<std::string, std::string> provenance;
    std::map<Index2, bool> admissible;

    cplx p(int k, int m, int n) const;
    bool has_p(int k, int m, int n) const { return P.count({k, m, n}) > 0; }
    void set_p(int k, int m, int n, const TaggedScalar& v, const std::string& from);
};

struct ChainOptions {
    double forcing_sign = -1.0;
    bool k3_weight_three = true;  // D2 with K1 + K2 + 3 K3 + K4
    bool tag_junk = true;
    bool with_g1 = true;
    // optional additions to N_{4,1}, N_{4,2} (i * field admissible); empty = none
    PairField extra_N41;
    PairField extra_N42;
};

struct AuxBundleN2 {
    PairField K1, K2, K3, K4, K5, G1;
    TaggedScalar D1;
    cplx D2 = 0.0, D2_other = 0.0;  // chosen and discarded K3 weight readings
    cplx D3 = 0.0, D3_without_g1 = 0.0, D4 = 0.0;
    cplx X32 = 0.0;        // sign * (D1 + D2 + D3 + D4)
    cplx X32_other = 0.0;  // with the discarded K3 reading
    double form = 0.0;     // -6 Im <sigma1 R30, N30>
    double form_K = 0.0;   // 6 Im <sigma1 R30, K1 + K2 + K3 + K4>
    ResolventAnswer r30;
};

struct IdentityCheck {
    std::string name;
    cplx lhs = 0.0, rhs = 0.0;
    bool real_part_only = true;
    double residual = 0.0;  // relative
};

struct AuxBundleN3 {
    CVec H1[3], H2[3];
    CVec F[6];
    CVec Om1, Om2;
    CVec M1[4], M2[4];
    PairField calM_R40;
    cplx G[6];
    cplx W11 = 0.0, W21 = 0.0, W12 = 0.0, W22 = 0.0;
    TaggedScalar E1, E2, E3;
    cplx E40 = 0.0, E41 = 0.0, Y1 = 0.0, Y2 = 0.0;
    double form = 0.0;  // -8 Im <sigma1 R40, N40>
    std::vector<IdentityCheck> identities;
    ResolventAnswer r40;
};

// order 2: (2,0), (0,2) and (1,1)
CoefficientTable chain_order2(const Resolvent& res, const ChainOptions& opt = {});

// order 3 for N = 2: K1..K5, N30, R30 (embedded, k = 3), (3,1) entries and D1..D4
AuxBundleN2 chain_order3_N2(const Resolvent& res, CoefficientTable& table, const ChainOptions& opt = {});

// order 3 for N = 3 (regular solves) followed by the order 4 objects
AuxBundleN3 chain_order4_N3(const Resolvent& res, CoefficientTable& table, const ChainOptions& opt = {});

// N_{m,n} from the Taylor expansion of the nonlinearity, using the decomposition
// fields in the table up to total order (m + n - 1). Only meaningful for sign = -1.
PairField polynomial_forcing(const Resolvent& res, const CoefficientTable& table, int m, int n);

// P^{(k)}_{m,n} from N_{m,n} for frequency (m - n) eps, m != n; k = 1..4
cplx p_from_forcing(const Resolvent& res, int k, int m, int n, const PairField& N);

struct TableCheck {
    double conjugation = 0.0;   // max |P_{m,n} - conj P_{n,m}|
    double reality = 0.0;       // max violation of the real/imaginary pattern, m, n <= N
    double admissibility = 0.0; // max over i N_{m,n}, R_{m,n}, m, n <= N
    double parity = 0.0;        // max parity residual over all stored fields
    double vanishing = 0.0;     // P^{(3,4)} at even m+n, P^{(1,2)} at odd m+n
    std::vector<std::string> notes;
};
TableCheck check_table(const Resolvent& res, const CoefficientTable& table, int N);

}  // namespace tfgr
