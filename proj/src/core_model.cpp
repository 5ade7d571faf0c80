#include "tavis/core_model.hpp"

#include "tavis/errors.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tavis {

double SystemParams::gamma_bar() const {
    if (n_atoms <= 0 || gamma.empty()) return 0.0;
    const double sum_sq =
        std::accumulate(gamma.begin(), gamma.end(), 0.0, [](double acc, double g) { return acc + g * g; });
    return std::sqrt(sum_sq / static_cast<double>(n_atoms));
}

void SystemParams::validate() const {
    std::vector<std::string> problems;
    if (n_atoms < 0) problems.emplace_back("n_atoms must be nonnegative");
    if (static_cast<int>(omega.size()) != n_atoms)
        problems.emplace_back("omega has " + std::to_string(omega.size()) + " entries, expected " +
                              std::to_string(n_atoms));
    if (static_cast<int>(gamma.size()) != n_atoms)
        problems.emplace_back("gamma has " + std::to_string(gamma.size()) + " entries, expected " +
                              std::to_string(n_atoms));
    if (!(kappa >= 0.0)) problems.emplace_back("kappa must be >= 0");
    if (!std::isfinite(omega_r)) problems.emplace_back("omega_r must be finite");
    for (double w : omega)
        if (!std::isfinite(w)) problems.emplace_back("omega entries must be finite");
    for (double g : gamma)
        if (!std::isfinite(g)) problems.emplace_back("gamma entries must be finite");
    if (problems.empty()) return;
    std::ostringstream os;
    os << "invalid SystemParams:";
    for (const auto& p : problems) os << "\n  - " << p;
    throw InvalidArgument(os.str());
}

SystemParams SystemParams::uniform(int n_atoms, double omega_s, double omega_r, double gamma,
                                   double kappa) {
    SystemParams p;
    p.n_atoms = n_atoms;
    p.omega_r = omega_r;
    p.omega.assign(static_cast<std::size_t>(n_atoms), omega_s);
    p.gamma.assign(static_cast<std::size_t>(n_atoms), gamma);
    p.kappa = kappa;
    return p;
}

bool has_equal_detunings(const SystemParams& params) {
    for (double w : params.omega)
        if (std::abs(w - params.omega.front()) > kDegeneracyTolerance) return false;
    return true;
}

// ---------------------------------------------------------------------------

TruncatedBasis::TruncatedBasis(int n_atoms, int max_cavity_photons)
    : n_atoms_(n_atoms), max_photons_(max_cavity_photons) {
    if (n_atoms < 0 || n_atoms > 20) throw InvalidArgument("TruncatedBasis: n_atoms out of range");
    if (max_cavity_photons < 0) throw InvalidArgument("TruncatedBasis: max_cavity_photons must be >= 0");
    dim_ = (std::size_t{1} << n_atoms) * static_cast<std::size_t>(max_cavity_photons + 1);
}

std::size_t TruncatedBasis::encode(std::uint32_t atom_bits, int photons) const {
    if (atom_bits >= (1u << n_atoms_) || photons < 0 || photons > max_photons_)
        throw InvalidArgument("TruncatedBasis::encode: state outside the truncated space");
    return static_cast<std::size_t>(atom_bits) * static_cast<std::size_t>(max_photons_ + 1) +
           static_cast<std::size_t>(photons);
}

std::pair<std::uint32_t, int> TruncatedBasis::decode(std::size_t index) const {
    if (index >= dim_) throw InvalidArgument("TruncatedBasis::decode: index out of range");
    const auto stride = static_cast<std::size_t>(max_photons_ + 1);
    return {static_cast<std::uint32_t>(index / stride), static_cast<int>(index % stride)};
}

bool TruncatedBasis::atom_excited(std::size_t index, int atom) const {
    return (decode(index).first & atom_bit(atom)) != 0;
}

int TruncatedBasis::excitation(std::size_t index) const {
    const auto [bits, n] = decode(index);
    return std::popcount(bits) + n;
}

std::size_t TruncatedBasis::index_of(std::string_view ket) const {
    if (ket.size() < static_cast<std::size_t>(n_atoms_) + 1)
        throw InvalidArgument("ket '" + std::string(ket) + "' is too short");
    std::uint32_t bits = 0;
    for (int j = 0; j < n_atoms_; ++j) {
        const char c = ket[static_cast<std::size_t>(j)];
        if (c == 'e')
            bits |= atom_bit(j);
        else if (c != 'g')
            throw InvalidArgument("ket '" + std::string(ket) + "': atom symbols must be 'e' or 'g'");
    }
    const std::string_view digits = ket.substr(static_cast<std::size_t>(n_atoms_));
    int n = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') throw InvalidArgument("ket '" + std::string(ket) + "': bad photon count");
        n = n * 10 + (c - '0');
    }
    if (n > max_photons_)
        throw InvalidArgument("ket '" + std::string(ket) + "': photon count exceeds truncation");
    return encode(bits, n);
}

std::string TruncatedBasis::ket_of(std::size_t index) const {
    const auto [bits, n] = decode(index);
    std::string s;
    for (int j = 0; j < n_atoms_; ++j) s.push_back((bits & atom_bit(j)) ? 'e' : 'g');
    s += std::to_string(n);
    return s;
}

std::vector<std::size_t> TruncatedBasis::excitation_sector(int excitations) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dim_; ++i)
        if (excitation(i) == excitations) out.push_back(i);
    return out;
}

// ---------------------------------------------------------------------------

OperatorMatrix::OperatorMatrix(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DimensionMismatch("OperatorMatrix must be square");
}

namespace {

void check_dims(const SystemParams& params, const TruncatedBasis& basis) {
    params.validate();
    if (basis.n_atoms() != params.n_atoms)
        throw DimensionMismatch("basis has " + std::to_string(basis.n_atoms()) + " atoms, params have " +
                                std::to_string(params.n_atoms));
}

}  // namespace

OperatorMatrix build_hamiltonian(const SystemParams& params, const TruncatedBasis& basis) {
    check_dims(params, basis);
    const auto K = static_cast<Eigen::Index>(basis.dimension());
    const int N = params.n_atoms;
    const int R = basis.max_cavity_photons();
    CMatrix H = CMatrix::Zero(K, K);
    for (Eigen::Index i = 0; i < K; ++i) {
        const auto [bits, n] = basis.decode(static_cast<std::size_t>(i));
        double diag = params.omega_r * n;
        for (int j = 0; j < N; ++j) {
            const bool up = (bits & basis.atom_bit(j)) != 0;
            diag += 0.5 * params.omega[static_cast<std::size_t>(j)] * (up ? 1.0 : -1.0);
        }
        H(i, i) = diag;
        // a* s-_j moves an excitation from atom j into the cavity; dropped at n == R.
        for (int j = 0; j < N; ++j) {
            if (!(bits & basis.atom_bit(j)) || n >= R) continue;
            const auto target = static_cast<Eigen::Index>(basis.encode(bits ^ basis.atom_bit(j), n + 1));
            const double amp = params.gamma[static_cast<std::size_t>(j)] * std::sqrt(static_cast<double>(n + 1));
            H(target, i) += amp;
            H(i, target) += amp;
        }
    }
    return OperatorMatrix(std::move(H));
}

OperatorMatrix build_coupling(const SystemParams& params, const TruncatedBasis& basis) {
    check_dims(params, basis);
    const auto K = static_cast<Eigen::Index>(basis.dimension());
    CMatrix L = CMatrix::Zero(K, K);
    const double root_kappa = std::sqrt(params.kappa);
    for (Eigen::Index i = 0; i < K; ++i) {
        const auto [bits, n] = basis.decode(static_cast<std::size_t>(i));
        if (n == 0) continue;
        const auto target = static_cast<Eigen::Index>(basis.encode(bits, n - 1));
        L(target, i) = root_kappa * std::sqrt(static_cast<double>(n));
    }
    return OperatorMatrix(std::move(L));
}

OperatorMatrix build_effective_hamiltonian(const SystemParams& params, const TruncatedBasis& basis) {
    const CMatrix H = build_hamiltonian(params, basis).matrix();
    const CMatrix L = build_coupling(params, basis).matrix();
    return OperatorMatrix(H - 0.5 * kI * (L.adjoint() * L));
}

OperatorMatrix build_excitation_number(const TruncatedBasis& basis) {
    const auto K = static_cast<Eigen::Index>(basis.dimension());
    CMatrix n_op = CMatrix::Zero(K, K);
    for (Eigen::Index i = 0; i < K; ++i) n_op(i, i) = basis.excitation(static_cast<std::size_t>(i));
    return OperatorMatrix(std::move(n_op));
}

CVector basis_ket(const TruncatedBasis& basis, std::string_view ket) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    v(static_cast<Eigen::Index>(basis.index_of(ket))) = 1.0;
    return v;
}

}  // namespace tavis
