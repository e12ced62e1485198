#pragma once

// Classical-to-quantum embeddings built from layered parameterized circuits.
//
// A circuit is an ordered list of layers. Each layer first applies its data
// block S_l(x) and then its parameter block U_l(theta_l), so the overall
// unitary is U(theta, x) = U_L S_L ... U_1 S_1 acting on |0...0>.
// Qubit 0 is the most significant bit of the basis index.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qtl/errors.hpp"
#include "qtl/qmath.hpp"

namespace qtl {

// ---------------------------------------------------------------------------
// Single-qubit gate matrices
// ---------------------------------------------------------------------------

/// Pauli-X rotation exp(-i x X / 2).
inline ComplexMatrix rx_gate(double x) {
    const double c = std::cos(0.5 * x), s = std::sin(0.5 * x);
    ComplexMatrix m(2, 2);
    m << Complex(c, 0.0), Complex(0.0, -s),
         Complex(0.0, -s), Complex(c, 0.0);
    return m;
}

inline ComplexMatrix ry_gate(double x) {
    const double c = std::cos(0.5 * x), s = std::sin(0.5 * x);
    ComplexMatrix m(2, 2);
    m << c, -s,
         s, c;
    return m;
}

inline ComplexMatrix rz_gate(double x) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = std::polar(1.0, -0.5 * x);
    m(1, 1) = std::polar(1.0, 0.5 * x);
    return m;
}

/// General rotation with the phase convention
///   [[ e^{-i(t1+t3)/2} cos(t2/2), -e^{-i(t1-t3)/2} sin(t2/2)],
///    [ e^{ i(t1-t3)/2} sin(t2/2),  e^{ i(t1+t3)/2} cos(t2/2)]].
inline ComplexMatrix rot_gate(double theta1, double theta2, double theta3) {
    const double c = std::cos(0.5 * theta2), s = std::sin(0.5 * theta2);
    const double sum = 0.5 * (theta1 + theta3), diff = 0.5 * (theta1 - theta3);
    ComplexMatrix m(2, 2);
    m(0, 0) = std::polar(c, -sum);
    m(0, 1) = -std::polar(s, -diff);
    m(1, 0) = std::polar(s, diff);
    m(1, 1) = std::polar(c, sum);
    return m;
}

inline ComplexMatrix hadamard_gate() {
    const double r = 1.0 / std::sqrt(2.0);
    ComplexMatrix m(2, 2);
    m << r, r,
         r, -r;
    return m;
}

inline ComplexMatrix pauli_x_gate() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Embedding parameter point; angles are reduced into [0, 2*pi).
class ThetaVector {
public:
    ThetaVector() = default;
    explicit ThetaVector(std::vector<double> angles) : angles_(std::move(angles)) {
        for (double& a : angles_) a = reduce(a);
    }
    ThetaVector(std::initializer_list<double> angles) : ThetaVector(std::vector<double>(angles)) {}

    static double reduce(double a) {
        double r = std::fmod(a, kTwoPi);
        if (r < 0.0) r += kTwoPi;
        if (r >= kTwoPi) r = 0.0;
        return r;
    }

    std::size_t size() const noexcept { return angles_.size(); }
    double operator[](std::size_t i) const { return angles_[i]; }
    const std::vector<double>& angles() const noexcept { return angles_; }

    friend bool operator==(const ThetaVector&, const ThetaVector&) = default;

private:
    std::vector<double> angles_;
};

// ---------------------------------------------------------------------------
// Circuit description
// ---------------------------------------------------------------------------

enum class GateKind { rx, ry, rz, rot, h, x, cnot, cz };

inline std::size_t gate_param_count(GateKind k) {
    switch (k) {
        case GateKind::rx:
        case GateKind::ry:
        case GateKind::rz: return 1;
        case GateKind::rot: return 3;
        default: return 0;
    }
}

inline bool is_two_qubit(GateKind k) { return k == GateKind::cnot || k == GateKind::cz; }

inline const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::rx: return "rx";
        case GateKind::ry: return "ry";
        case GateKind::rz: return "rz";
        case GateKind::rot: return "rot";
        case GateKind::h: return "h";
        case GateKind::x: return "x";
        case GateKind::cnot: return "cnot";
        case GateKind::cz: return "cz";
    }
    return "?";
}

inline GateKind parse_gate_kind(const std::string& s) {
    for (GateKind k : {GateKind::rx, GateKind::ry, GateKind::rz, GateKind::rot, GateKind::h,
                       GateKind::x, GateKind::cnot, GateKind::cz}) {
        if (s == gate_name(k)) return k;
    }
    throw ConfigInvalid("unknown gate '" + s + "'");
}

/// One gate. For two-qubit gates `qubit` is the control. In a data block the
/// rotation angle of rx/ry/rz is `scale * x`.
struct Gate {
    GateKind kind = GateKind::rx;
    int qubit = 0;
    int target = -1;
    double scale = 1.0;
};

struct Layer {
    std::vector<Gate> data;    // S_l(x)
    std::vector<Gate> params;  // U_l(theta_l)
};

enum class EncodingKind { one_time, repeated };

namespace detail {

inline void apply_single(ComplexVector& psi, int num_qubits, int q, const ComplexMatrix& g) {
    const std::size_t dim = std::size_t{1} << num_qubits;
    const std::size_t stride = std::size_t{1} << (num_qubits - 1 - q);
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & stride) continue;
        const Complex a = psi(i), b = psi(i | stride);
        psi(i) = g(0, 0) * a + g(0, 1) * b;
        psi(i | stride) = g(1, 0) * a + g(1, 1) * b;
    }
}

inline void apply_controlled(ComplexVector& psi, int num_qubits, int control, int target,
                             bool phase) {
    const std::size_t dim = std::size_t{1} << num_qubits;
    const std::size_t cbit = std::size_t{1} << (num_qubits - 1 - control);
    const std::size_t tbit = std::size_t{1} << (num_qubits - 1 - target);
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(i & cbit)) continue;
        if (phase) {
            if (i & tbit) psi(i) = -psi(i);
        } else if (!(i & tbit)) {
            std::swap(psi(i), psi(i | tbit));
        }
    }
}

}  // namespace detail

/// Layered parameterized embedding circuit.
class EmbeddingAnsatz {
public:
    static constexpr int max_qubits = 4;

    EmbeddingAnsatz(int num_qubits, std::vector<Layer> layers, std::string name = "custom")
        : num_qubits_(num_qubits), layers_(std::move(layers)), name_(std::move(name)) {
        if (num_qubits_ < 1 || num_qubits_ > max_qubits) {
            throw ConfigInvalid("ansatz: num_qubits must be in [1, 4], got " +
                                std::to_string(num_qubits_));
        }
        for (const Layer& l : layers_) {
            for (const Gate& g : l.data) {
                check_gate(g);
                if (g.kind == GateKind::rot) throw ConfigInvalid("ansatz: rot is not a data gate");
            }
            for (const Gate& g : l.params) {
                check_gate(g);
                num_params_ += gate_param_count(g.kind);
            }
        }
    }

    int num_qubits() const noexcept { return num_qubits_; }
    std::size_t dim() const noexcept { return std::size_t{1} << num_qubits_; }
    std::size_t num_params() const noexcept { return num_params_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    const std::string& name() const noexcept { return name_; }

    /// one_time when at most the first layer carries data gates.
    EncodingKind encoding_kind() const {
        for (std::size_t l = 1; l < layers_.size(); ++l) {
            if (!layers_[l].data.empty()) return EncodingKind::repeated;
        }
        return EncodingKind::one_time;
    }

    /// Data block of the single encoding stage (empty means identity).
    const std::vector<Gate>& encoding_gates() const {
        if (encoding_kind() != EncodingKind::one_time) {
            throw NotOneTimeEncoding("ansatz '" + name_ + "' encodes data in more than one layer");
        }
        static const std::vector<Gate> none;
        return layers_.empty() ? none : layers_.front().data;
    }

    /// Applies the full circuit to `psi` in place.
    void apply(ComplexVector& psi, const ThetaVector& theta, double x) const {
        if (theta.size() != num_params_) {
            throw ArityMismatch("ansatz '" + name_ + "' expects " + std::to_string(num_params_) +
                                " parameters, got " + std::to_string(theta.size()));
        }
        if (static_cast<std::size_t>(psi.size()) != dim()) {
            throw DimMismatch("ansatz: state dimension mismatch");
        }
        std::size_t next = 0;
        for (const Layer& l : layers_) {
            for (const Gate& g : l.data) apply_gate(psi, g, g.scale * x, 0.0, 0.0);
            for (const Gate& g : l.params) {
                const std::size_t k = gate_param_count(g.kind);
                const double a = k > 0 ? theta[next] : 0.0;
                const double b = k > 1 ? theta[next + 1] : 0.0;
                const double c = k > 2 ? theta[next + 2] : 0.0;
                apply_gate(psi, g, a, b, c);
                next += k;
            }
        }
    }

    /// U(theta, x) |0...0>.
    ComplexVector state(const ThetaVector& theta, double x) const {
        ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(dim()));
        psi(0) = 1.0;
        apply(psi, theta, x);
        return psi;
    }

    /// Full circuit unitary, column by column.
    ComplexMatrix unitary(const ThetaVector& theta, double x) const {
        const auto n = static_cast<Eigen::Index>(dim());
        ComplexMatrix u = ComplexMatrix::Identity(n, n);
        for (Eigen::Index c = 0; c < n; ++c) {
            ComplexVector col = u.col(c);
            apply(col, theta, x);
            u.col(c) = col;
        }
        return u;
    }

    DensityMatrix density(const ThetaVector& theta, double x) const {
        return DensityMatrix::pure(state(theta, x));
    }

private:
    void check_gate(const Gate& g) const {
        if (g.qubit < 0 || g.qubit >= num_qubits_) {
            throw ConfigInvalid(std::string("ansatz: gate ") + gate_name(g.kind) +
                                " acts outside the register");
        }
        if (is_two_qubit(g.kind) &&
            (g.target < 0 || g.target >= num_qubits_ || g.target == g.qubit)) {
            throw ConfigInvalid(std::string("ansatz: bad target for ") + gate_name(g.kind));
        }
    }

    void apply_gate(ComplexVector& psi, const Gate& g, double a, double b, double c) const {
        switch (g.kind) {
            case GateKind::rx: detail::apply_single(psi, num_qubits_, g.qubit, rx_gate(a)); break;
            case GateKind::ry: detail::apply_single(psi, num_qubits_, g.qubit, ry_gate(a)); break;
            case GateKind::rz: detail::apply_single(psi, num_qubits_, g.qubit, rz_gate(a)); break;
            case GateKind::rot:
                detail::apply_single(psi, num_qubits_, g.qubit, rot_gate(a, b, c));
                break;
            case GateKind::h: detail::apply_single(psi, num_qubits_, g.qubit, hadamard_gate()); break;
            case GateKind::x: detail::apply_single(psi, num_qubits_, g.qubit, pauli_x_gate()); break;
            case GateKind::cnot: detail::apply_controlled(psi, num_qubits_, g.qubit, g.target, false); break;
            case GateKind::cz: detail::apply_controlled(psi, num_qubits_, g.qubit, g.target, true); break;
        }
    }

    int num_qubits_;
    std::vector<Layer> layers_;
    std::string name_;
    std::size_t num_params_ = 0;
};

/// The single-qubit example circuit U_theta(x) = R_X(x) Rot_theta R_X(x).
inline EmbeddingAnsatz rx_rot_rx() {
    Layer first{{Gate{GateKind::rx, 0}}, {Gate{GateKind::rot, 0}}};
    Layer second{{Gate{GateKind::rx, 0}}, {}};
    return EmbeddingAnsatz(1, {first, second}, "rx_rot_rx");
}

/// rho_theta(x) = U(theta, x) |0><0| U(theta, x)^dagger.
inline DensityMatrix embed(const EmbeddingAnsatz& ansatz, const ThetaVector& theta, double x) {
    return ansatz.density(theta, x);
}

/// Anything that maps (theta, x) to a density matrix.
template <class E>
concept Embedding = requires(const E& e, const ThetaVector& t, double x) {
    { e.dim() } -> std::convertible_to<std::size_t>;
    { e.num_params() } -> std::convertible_to<std::size_t>;
    { e.density(t, x) } -> std::same_as<DensityMatrix>;
};

static_assert(Embedding<EmbeddingAnsatz>);

// ---------------------------------------------------------------------------
// Parameter grids
// ---------------------------------------------------------------------------

struct ThetaGrid {
    std::vector<ThetaVector> points;  // lexicographic, axis 0 slowest
    std::size_t resolution = 0;       // points per axis; 0 for irregular grids

    std::size_t size() const noexcept { return points.size(); }
    const ThetaVector& operator[](std::size_t i) const { return points[i]; }
};

inline constexpr std::size_t kDefaultGridCap = 1'000'000;

/// Uniform grid over [0, 2*pi)^d with `resolution` points per axis.
inline ThetaGrid make_theta_grid(std::size_t num_params, std::size_t resolution,
                                 std::size_t cap = kDefaultGridCap) {
    if (resolution < 2) throw ConfigInvalid("theta grid: resolution must be >= 2");
    std::size_t total = 1;
    for (std::size_t d = 0; d < num_params; ++d) {
        if (total > cap / resolution) {
            throw GridTooLarge(std::to_string(resolution) + "^" + std::to_string(num_params) +
                               " exceeds cap " + std::to_string(cap));
        }
        total *= resolution;
    }
    ThetaGrid grid;
    grid.resolution = resolution;
    grid.points.reserve(total);
    const double step = kTwoPi / static_cast<double>(resolution);
    std::vector<std::size_t> idx(num_params, 0);
    std::vector<double> angles(num_params);
    for (std::size_t p = 0; p < total; ++p) {
        for (std::size_t d = 0; d < num_params; ++d) angles[d] = step * static_cast<double>(idx[d]);
        grid.points.emplace_back(angles);
        for (std::size_t d = num_params; d-- > 0;) {
            if (++idx[d] < resolution) break;
            idx[d] = 0;
        }
    }
    return grid;
}

template <Embedding E>
ThetaGrid make_theta_grid(const E& embedding, std::size_t resolution,
                          std::size_t cap = kDefaultGridCap) {
    return make_theta_grid(embedding.num_params(), resolution, cap);
}

/// 3^d points around `center` spaced half a coarse step apart (lexicographic).
inline ThetaGrid local_refinement_grid(const ThetaVector& center, std::size_t coarse_resolution) {
    const double h = 0.5 * kTwoPi / static_cast<double>(coarse_resolution);
    const std::size_t d = center.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= 3;
    ThetaGrid grid;
    grid.points.reserve(total);
    std::vector<int> off(d, -1);
    std::vector<double> angles(d);
    for (std::size_t p = 0; p < total; ++p) {
        for (std::size_t i = 0; i < d; ++i) angles[i] = center[i] + h * off[i];
        grid.points.emplace_back(angles);
        for (std::size_t i = d; i-- > 0;) {
            if (++off[i] <= 1) break;
            off[i] = -1;
        }
    }
    return grid;
}

}  // namespace qtl
