#include "chiprobe/states.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "chiprobe/error.hpp"

namespace chiprobe {

namespace {

double cat_norm(const CatState& c) {
  return 1.0 + c.sign * std::exp(-2.0 * std::norm(c.alpha)) * std::cos(c.varphi);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Fock amplitudes of |alpha> truncated to dim levels (unnormalized tail dropped).
Eigen::VectorXcd coherent_amplitudes(cplx alpha, int dim) {
  Eigen::VectorXcd v(dim);
  cplx amp = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < dim; ++n) {
    v(n) = amp;
    amp *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v;
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix rho, double truncation_error)
    : rho_(std::move(rho)), truncation_error_(truncation_error) {
  require(rho_.rows() == rho_.cols() && rho_.rows() >= 1, "density matrix must be square and non-empty");
  require(rho_.allFinite(), "density matrix has non-finite entries");
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  require(herm <= 1e-12, "density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
  const cplx tr = rho_.trace();
  require(std::abs(tr - 1.0) <= 1e-10, "density matrix trace deviates from 1 by " + std::to_string(std::abs(tr - 1.0)));
  const Matrix sym = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  require(min_eig >= -1e-10, "density matrix is not positive semidefinite (eigenvalue " + std::to_string(min_eig) + ")");
}

DensityMatrix DensityMatrix::repaired(const Matrix& rho, double eig_tol) {
  require(rho.rows() == rho.cols() && rho.rows() >= 1, "density matrix must be square and non-empty");
  const Matrix sym = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  Eigen::VectorXd eig = solver.eigenvalues();
  if (eig.minCoeff() < -eig_tol) {
    fail(ErrorCode::kComputation, "state has eigenvalue " + std::to_string(eig.minCoeff()) + " below -" +
                                      std::to_string(eig_tol));
  }
  eig = eig.cwiseMax(0.0);
  const double total = eig.sum();
  require(total > 0.0, "state has zero trace");
  Matrix out = solver.eigenvectors() * (eig / total).cast<cplx>().asDiagonal() * solver.eigenvectors().adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(out));
}

double DensityMatrix::tail_population(int level) const {
  double sum = 0.0;
  for (int n = std::max(level, 0); n < dim(); ++n) sum += rho_(n, n).real();
  return sum;
}

OscillatorState OscillatorState::fock(int n) {
  require(n >= 0, "Fock index must be >= 0");
  return OscillatorState(FockState{n});
}

OscillatorState OscillatorState::coherent(cplx alpha) {
  require(std::isfinite(alpha.real()) && std::isfinite(alpha.imag()), "coherent amplitude must be finite");
  return OscillatorState(CoherentState{alpha});
}

OscillatorState OscillatorState::thermal(double nbar) {
  require(std::isfinite(nbar) && nbar >= 0.0, "thermal occupation must be >= 0");
  return OscillatorState(ThermalState{nbar});
}

OscillatorState OscillatorState::cat(cplx alpha, double varphi, int sign) {
  require(std::isfinite(alpha.real()) && std::isfinite(alpha.imag()) && std::isfinite(varphi),
          "cat parameters must be finite");
  require(sign == 1 || sign == -1, "cat sign must be +1 or -1");
  const CatState c{alpha, varphi, sign};
  require(cat_norm(c) > 1e-12, "cat state has vanishing norm");
  return OscillatorState(c);
}

OscillatorState OscillatorState::numeric(DensityMatrix rho) { return OscillatorState(std::move(rho)); }

double parse_real(const std::string& raw) {
  const std::string text = trim(raw);
  require(!text.empty(), "empty number");
  // Optional leading sign, then a product/quotient of numbers and `pi`.
  std::size_t pos = 0;
  double sign = 1.0;
  if (text[pos] == '+' || text[pos] == '-') {
    if (text[pos] == '-') sign = -1.0;
    ++pos;
  }
  double value = 1.0;
  bool divide = false;
  bool have_term = false;
  while (pos < text.size()) {
    double term = 0.0;
    if (text.compare(pos, 2, "pi") == 0) {
      term = kPi;
      pos += 2;
    } else {
      std::size_t used = 0;
      try {
        term = std::stod(text.substr(pos), &used);
      } catch (const std::exception&) {
        fail(ErrorCode::kInvalidArgument, "cannot parse number '" + text + "'");
      }
      pos += used;
    }
    value = divide ? value / term : value * term;
    have_term = true;
    if (pos == text.size()) break;
    if (text[pos] == '*') {
      divide = false;
    } else if (text[pos] == '/') {
      divide = true;
    } else {
      fail(ErrorCode::kInvalidArgument, "cannot parse number '" + text + "'");
    }
    ++pos;
    require(pos < text.size(), "dangling operator in '" + text + "'");
  }
  require(have_term && std::isfinite(value), "cannot parse number '" + text + "'");
  return sign * value;
}

cplx parse_complex(const std::string& raw) {
  std::string text = trim(raw);
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); }), text.end());
  require(!text.empty(), "empty complex number");
  if (text.back() != 'i' && text.back() != 'j') return {parse_real(text), 0.0};
  text.pop_back();
  // Split at the last sign that is not part of an exponent or the leading sign.
  std::size_t split = std::string::npos;
  for (std::size_t k = text.size(); k-- > 1;) {
    if ((text[k] == '+' || text[k] == '-') && text[k - 1] != 'e' && text[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [](const std::string& part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    if (part.back() == '*') return parse_real(part.substr(0, part.size() - 1));
    return parse_real(part);
  };
  if (split == std::string::npos) return {0.0, imag_of(text)};
  return {parse_real(text.substr(0, split)), imag_of(text.substr(split))};
}

OscillatorState OscillatorState::parse(const std::string& raw) {
  const std::string spec = trim(raw);
  const auto colon = spec.find(':');
  require(colon != std::string::npos, "state spec '" + spec + "' must look like kind:params");
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  if (kind == "fock") {
    const double n = parse_real(args);
    require(n >= 0 && n == std::floor(n) && n < 1e6, "fock index must be a non-negative integer");
    return fock(static_cast<int>(n));
  }
  if (kind == "coherent") return coherent(parse_complex(args));
  if (kind == "thermal") return thermal(parse_real(args));
  if (kind == "vacuum") return vacuum();
  if (kind == "cat") {
    std::vector<std::string> parts;
    std::stringstream ss(args);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(trim(item));
    require(parts.size() == 3, "cat spec must be cat:alpha,varphi,+|-");
    require(parts[2] == "+" || parts[2] == "-", "cat parity must be + or -");
    return cat(parse_complex(parts[0]), parse_real(parts[1]), parts[2] == "+" ? +1 : -1);
  }
  fail(ErrorCode::kInvalidArgument, "unknown state kind '" + kind + "'");
}

std::string OscillatorState::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockState>) {
          os << "fock:" << s.n;
        } else if constexpr (std::is_same_v<T, CoherentState>) {
          os << "coherent:" << s.alpha.real() << (s.alpha.imag() < 0 ? "-" : "+") << std::abs(s.alpha.imag()) << "i";
        } else if constexpr (std::is_same_v<T, ThermalState>) {
          os << "thermal:" << s.nbar;
        } else if constexpr (std::is_same_v<T, CatState>) {
          os << "cat:" << s.alpha.real() << (s.alpha.imag() < 0 ? "-" : "+") << std::abs(s.alpha.imag()) << "i,"
             << s.varphi << "," << (s.sign > 0 ? "+" : "-");
        } else {
          os << "matrix:" << s.dim();
        }
      },
      form_);
  return os.str();
}

double laguerre(int n, double x) {
  require(n >= 0, "laguerre order must be >= 0");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double curr = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * curr - k * prev) / (k + 1.0);
    prev = curr;
    curr = next;
  }
  return curr;
}

cplx chi_analytic(const OscillatorState& state, cplx beta) {
  const double b2 = std::norm(beta);
  return std::visit(
      [&](const auto& s) -> cplx {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockState>) {
          return std::exp(-0.5 * b2) * laguerre(s.n, b2);
        } else if constexpr (std::is_same_v<T, CoherentState>) {
          return std::exp(-0.5 * b2 + beta * std::conj(s.alpha) - std::conj(beta) * s.alpha);
        } else if constexpr (std::is_same_v<T, ThermalState>) {
          return std::exp(-(s.nbar + 0.5) * b2);
        } else if constexpr (std::is_same_v<T, CatState>) {
          const cplx a = s.alpha;
          const double overlap = std::exp(-2.0 * std::norm(a));
          const double diag_norm = 1.0 + s.sign * overlap * std::cos(s.varphi);
          const double modulation = std::cos(2.0 * std::imag(a * std::conj(beta)));
          const cplx diagonal = std::exp(-0.5 * b2) * modulation / diag_norm;
          const cplx interference = (std::exp(-kI * s.varphi - 0.5 * std::norm(beta - 2.0 * a)) +
                                     std::exp(kI * s.varphi - 0.5 * std::norm(beta + 2.0 * a))) /
                                    (2.0 * diag_norm);
          return diagonal + static_cast<double>(s.sign) * interference;
        } else {
          fail(ErrorCode::kInvalidArgument, "chi_analytic needs an analytic state; use chi_numeric for matrices");
        }
      },
      state.form());
}

Matrix annihilation(int dim) {
  require(dim >= 1, "dimension must be >= 1");
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix displacement_matrix(int dim, cplx beta) {
  const Matrix a = annihilation(dim);
  const Matrix generator = beta * a.adjoint() - std::conj(beta) * a;
  return generator.exp();
}

ChiNumeric chi_numeric(const DensityMatrix& rho, cplx beta) {
  PhasePoint checked(beta);
  const Matrix d = displacement_matrix(rho.dim(), checked.beta());
  ChiNumeric out;
  out.value = (rho.matrix() * d).trace();
  out.truncation_warning = rho.tail_population(rho.dim() - 5) > 1e-8;
  return out;
}

cplx characteristic(const OscillatorState& state, cplx beta) {
  if (const auto* m = std::get_if<DensityMatrix>(&state.form())) return chi_numeric(*m, beta).value;
  return chi_analytic(state, beta);
}

int minimum_dimension(const OscillatorState& state) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockState>) {
          return s.n + 1;
        } else if constexpr (std::is_same_v<T, CoherentState> || std::is_same_v<T, CatState>) {
          const double m = std::norm(s.alpha);
          return static_cast<int>(std::ceil(m + 6.0 * std::sqrt(m + 1.0)));
        } else if constexpr (std::is_same_v<T, ThermalState>) {
          if (s.nbar == 0.0) return 1;
          return static_cast<int>(std::ceil(10.0 * (s.nbar + 1.0)));
        } else {
          return s.dim();
        }
      },
      state.form());
}

DensityMatrix to_density_matrix(const OscillatorState& state, int dim) {
  require(dim >= 1, "dimension must be >= 1");
  const int needed = minimum_dimension(state);
  if (dim < needed) {
    fail(ErrorCode::kTruncation, "dimension " + std::to_string(dim) + " too small for " + state.describe() +
                                     " (needs >= " + std::to_string(needed) + ")");
  }
  return std::visit(
      [dim](const auto& s) -> DensityMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockState>) {
          Matrix m = Matrix::Zero(dim, dim);
          m(s.n, s.n) = 1.0;
          return DensityMatrix(std::move(m));
        } else if constexpr (std::is_same_v<T, ThermalState>) {
          Matrix m = Matrix::Zero(dim, dim);
          const double ratio = s.nbar / (s.nbar + 1.0);
          double p = 1.0 / (s.nbar + 1.0);
          double kept = 0.0;
          for (int n = 0; n < dim; ++n) {
            m(n, n) = p;
            kept += p;
            p *= ratio;
          }
          m /= kept;
          return DensityMatrix(std::move(m), 1.0 - kept);
        } else if constexpr (std::is_same_v<T, CoherentState> || std::is_same_v<T, CatState>) {
          Eigen::VectorXcd v;
          double exact_norm = 1.0;
          if constexpr (std::is_same_v<T, CoherentState>) {
            v = coherent_amplitudes(s.alpha, dim);
          } else {
            v = coherent_amplitudes(s.alpha, dim) +
                static_cast<double>(s.sign) * std::exp(-kI * s.varphi) * coherent_amplitudes(-s.alpha, dim);
            exact_norm = 2.0 * cat_norm(s);
          }
          const double kept = v.squaredNorm();
          v /= std::sqrt(kept);
          Matrix m = v * v.adjoint();
          m = 0.5 * (m + m.adjoint()).eval();
          return DensityMatrix(std::move(m), std::max(0.0, 1.0 - kept / exact_norm));
        } else {
          require(s.dim() == dim, "numeric state has a different dimension");
          return s;
        }
      },
      state.form());
}

}  // namespace chiprobe
