// core_model.hpp — Tavis-Cummings parameters, truncated Hilbert space, and
// the Hamiltonian / coupling / effective-Hamiltonian operators on it.
//
// Basis layout: atom 1 is the most significant bit of the atomic bitstring
// (1 = excited), the cavity photon number is the least significant digit:
//
//     index = bits * (R + 1) + n,   bits = sum_j z_j 2^(N - j)
//
// so |e1 g2 g3 0> at R = 1 is index 8 and |g1 g2 g3 1> is index 1.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tavis {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

struct SystemParams {
    int n_atoms = 0;
    double omega_r = 0.0;
    std::vector<double> omega;  // atomic detunings
    std::vector<double> gamma;  // atom-cavity couplings, sign allowed
    double kappa = 0.0;

    // sqrt((1/N) sum Gamma_k^2); zero for the empty cavity.
    double gamma_bar() const;

    // Throws InvalidArgument listing every violated invariant.
    void validate() const;

    // Resonant ensemble: N atoms at detuning omega_s with identical coupling.
    static SystemParams uniform(int n_atoms, double omega_s, double omega_r, double gamma,
                                double kappa);
};

// Frequencies within this absolute distance are treated as degenerate.
inline constexpr double kDegeneracyTolerance = 1e-9;

// True when every atomic detuning equals the first one within kDegeneracyTolerance.
bool has_equal_detunings(const SystemParams& params);

class TruncatedBasis {
public:
    TruncatedBasis(int n_atoms, int max_cavity_photons);

    int n_atoms() const noexcept { return n_atoms_; }
    int max_cavity_photons() const noexcept { return max_photons_; }
    std::size_t dimension() const noexcept { return dim_; }

    std::size_t encode(std::uint32_t atom_bits, int photons) const;
    std::pair<std::uint32_t, int> decode(std::size_t index) const;

    // atom is 0-based (atom 1 of the physics notation is atom 0 here).
    bool atom_excited(std::size_t index, int atom) const;
    int photons(std::size_t index) const { return static_cast<int>(index % (max_photons_ + 1)); }
    // Atomic excitations plus cavity photons.
    int excitation(std::size_t index) const;

    std::uint32_t atom_bit(int atom) const { return 1u << (n_atoms_ - 1 - atom); }

    // Parses kets like "egg0": N symbols in {e,g} followed by a photon count.
    std::size_t index_of(std::string_view ket) const;
    std::string ket_of(std::size_t index) const;

    // Basis indices whose total excitation equals `excitations`, ascending.
    std::vector<std::size_t> excitation_sector(int excitations) const;

private:
    int n_atoms_;
    int max_photons_;
    std::size_t dim_;
};

// Dense K x K operator on a TruncatedBasis.
class OperatorMatrix {
public:
    OperatorMatrix() = default;
    explicit OperatorMatrix(CMatrix m);

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const CMatrix& matrix() const noexcept { return m_; }
    OperatorMatrix adjoint() const { return OperatorMatrix(m_.adjoint()); }

private:
    CMatrix m_;
};

// H_TC = w_r a*a + sum_j [ (w_j/2) sz_j + G_j (a* s-_j + s+_j a) ], truncated at R photons.
OperatorMatrix build_hamiltonian(const SystemParams& params, const TruncatedBasis& basis);

// L = sqrt(kappa) a.
OperatorMatrix build_coupling(const SystemParams& params, const TruncatedBasis& basis);

// H_eff = H_TC - (i/2) L*L.
OperatorMatrix build_effective_hamiltonian(const SystemParams& params,
                                           const TruncatedBasis& basis);

// Total excitation number operator sum_j s+_j s-_j + a*a (diagonal).
OperatorMatrix build_excitation_number(const TruncatedBasis& basis);

// Column vector for a single basis ket.
CVector basis_ket(const TruncatedBasis& basis, std::string_view ket);

}  // namespace tavis
