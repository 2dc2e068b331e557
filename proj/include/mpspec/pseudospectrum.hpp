#pragma once

// Pseudospectrum fields eta(lambda) = sigma_min(M(lambda)) / gamma(lambda) over
// parameter grids, membership tests, row-deletion bounds and right-definiteness.

#include "mpspec/banded.hpp"
#include "mpspec/pencil.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mpspec {

struct Axis {
    enum class Kind { fixed, real, complex_box };
    Kind kind = Kind::fixed;
    cplx value = 0.0;                  // fixed
    double a = 0, b = 0, c = 0, d = 0;  // real: [a, b]; box: [a, b] x [c, d]
    int n_re = 1;
    int n_im = 1;

    static Axis fixed(cplx v);
    static Axis real(double a, double b, int n);
    static Axis complex_box(double a, double b, double c, double d, int n_re, int n_im);

    int size() const;
    /// Node i; inside a box the real part varies fastest.
    cplx node(int i) const;
    bool swept() const { return kind != Kind::fixed; }
};

struct GridSpec {
    std::vector<Axis> axes;

    /// Throws InputError on a malformed grid or a dimension mismatch.
    void validate(int m) const;
    std::size_t size() const;
    /// Node at a flat index; axis 0 varies slowest.
    EigenTuple node(std::size_t flat) const;
    /// Index of the last swept axis, the free parameter of the slice sweeps.
    int free_axis() const;
};

enum class FieldMethod { naive, slightly_tall, very_tall, automatic };

const char* to_string(FieldMethod method);
FieldMethod parse_field_method(const std::string& s);

struct PseudospectrumField {
    GridSpec grid;
    std::vector<double> values;  // eta per node, flat order
    FieldMethod method = FieldMethod::naive;
    PerturbationModel model;
    Telemetry telemetry;
    int slices = 0;
};

/// The concrete method `automatic` resolves to: dense SVD up to 64 x 64,
/// otherwise the preprocessed path that matches the shape when the pencil is
/// linear in the free parameter.
FieldMethod resolve_method(const MultiParamPencil& pencil, const GridSpec& grid,
                           FieldMethod requested);

/// OpenMP sweep; threads <= 0 keeps the runtime default. Bitwise equal to field_serial.
PseudospectrumField field(const MultiParamPencil& pencil, const PerturbationModel& model,
                          const GridSpec& grid, FieldMethod method = FieldMethod::automatic,
                          int threads = 0);

/// Single-threaded reference sweep.
PseudospectrumField field_serial(const MultiParamPencil& pencil, const PerturbationModel& model,
                                 const GridSpec& grid, FieldMethod method = FieldMethod::automatic);

/// Slice pencils with every parameter but `free` (zero-based) fixed to the
/// entries of `fixed`. Require the pencil to be affine in the free parameter
/// with a slice-independent free coefficient.
ReducedSlicePencil preprocess_very_tall(const MultiParamPencil& pencil, const EigenTuple& fixed,
                                        int free, Telemetry* tel = nullptr);
ReducedSlicePencil preprocess_slightly_tall(const MultiParamPencil& pencil,
                                            const EigenTuple& fixed, int free,
                                            Telemetry* tel = nullptr);

/// True iff the eigenvalue backward error at lambda is at most eps.
bool membership(const MultiParamPencil& pencil, const PerturbationModel& model,
                const EigenTuple& lambda, double eps);

struct MembershipTests {
    bool witness = false;  // an explicit admissible perturbation makes lambda an eigenvalue
    bool sigma = false;    // sigma_min <= eps gamma
    bool pinv = false;     // ||M^+|| >= 1 / (eps gamma)
};

MembershipTests membership_tests(const MultiParamPencil& pencil, const PerturbationModel& model,
                                 const EigenTuple& lambda, double eps);

struct SubmatrixReport {
    double sigma = 0.0;                 // sigma_min(M(lambda))
    std::vector<double> sub_sigma;      // sigma_min of each square selection
    int violations = 0;                 // selections with sub_sigma > sigma + 1e-12 scale
    double worst_excess = 0.0;
    bool in_pseudospectrum = false;
    bool in_all_selections = false;     // lambda in every selection's pseudospectrum
};

SubmatrixReport submatrix_bound_check(const MultiParamPencil& pencil,
                                      const PerturbationModel& model, const EigenTuple& lambda,
                                      double eps);

/// First grid node that lies in every selection pseudospectrum but not in the
/// pseudospectrum of the full pencil.
std::optional<EigenTuple> find_converse_counterexample(const MultiParamPencil& pencil,
                                                       const PerturbationModel& model,
                                                       const GridSpec& grid, double eps);

struct DefinitenessResult {
    bool certified = false;
    std::vector<int> selections;        // canonical selection indices, one per parameter
    std::vector<double> delta0_spectrum;
    bool sign_flipped = false;          // Delta_0 negative definite; reordering the selections makes it positive
    double margin = 0.0;                // min |eig| / ||Delta_0|| of the certified subset
    double best_margin = -1.0;          // best signed margin over all subsets
    std::vector<int> best_selections;
    int subsets_tried = 0;
};

/// Search m-subsets of row selections for a right definite square problem.
DefinitenessResult right_definiteness(const MultiParamPencil& pencil, double tol = 1e-10);

/// Delta_0 = sum over permutations of sign * V_{1 s(1)} (x) ... (x) V_{m s(m)}.
CMatrix delta0(const std::vector<std::vector<CMatrix>>& v);

}  // namespace mpspec
