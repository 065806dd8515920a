#include "locspec/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "locspec/errors.hpp"

namespace locspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative tolerance for accepting user matrices as Hermitian before they are symmetrized.
constexpr double kHermitianTol = 1e-12;

Matrix symmetrized(const Matrix& a) { return (a + a.adjoint()) / 2.0; }

Matrix checked_hermitian(const Matrix& a, int dimension, const char* what) {
    if (a.rows() != dimension || a.cols() != dimension) {
        std::ostringstream msg;
        msg << what << ": expected " << dimension << "x" << dimension << " matrix, got " << a.rows() << "x"
            << a.cols();
        throw ValidationError(msg.str());
    }
    if (!a.allFinite()) throw ValidationError(std::string(what) + ": non-finite entry");
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (hermitian_defect(a) > kHermitianTol * scale) {
        throw ValidationError(std::string(what) + ": matrix is not Hermitian");
    }
    return symmetrized(a);
}

double interior_point(double lo, double hi) {
    if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
    if (std::isfinite(lo)) return lo + 1.0;
    if (std::isfinite(hi)) return hi - 1.0;
    return 0.0;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

double hermitian_defect(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------------------------
// PolyMatrix

PolyMatrix::PolyMatrix(int dimension, double origin, std::vector<Matrix> coeffs)
    : dimension_(dimension), origin_(origin), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(Matrix::Zero(dimension, dimension));
    for (const auto& c : coeffs_) {
        if (c.rows() != dimension || c.cols() != dimension) {
            throw ValidationError("polynomial coefficient has wrong shape");
        }
    }
}

PolyMatrix PolyMatrix::constant(const Matrix& c, double origin) {
    return PolyMatrix(static_cast<int>(c.rows()), origin, {c});
}

Matrix PolyMatrix::operator()(double x) const {
    const double t = x - origin_;
    Matrix r = coeffs_.back();
    for (int k = degree() - 1; k >= 0; --k) {
        r *= t;
        r += coeffs_[k];
    }
    return r;
}

PolyMatrix PolyMatrix::squared() const {
    const int d = degree();
    std::vector<Matrix> out(2 * d + 1, Matrix::Zero(dimension_, dimension_));
    for (int i = 0; i <= d; ++i) {
        for (int j = 0; j <= d; ++j) out[i + j].noalias() += coeffs_[i] * coeffs_[j];
    }
    for (auto& c : out) c = symmetrized(c);
    return PolyMatrix(dimension_, origin_, std::move(out));
}

PolyMatrix PolyMatrix::rebased(double new_origin) const {
    const double shift = new_origin - origin_;
    if (shift == 0.0) return *this;
    const int d = degree();
    std::vector<Matrix> out(d + 1, Matrix::Zero(dimension_, dimension_));
    // (t' + shift)^k = sum_j C(k, j) shift^(k-j) t'^j
    for (int k = 0; k <= d; ++k) {
        for (int j = 0; j <= k; ++j) out[j] += binomial(k, j) * std::pow(shift, k - j) * coeffs_[k];
    }
    return PolyMatrix(dimension_, new_origin, std::move(out));
}

PolyMatrix& PolyMatrix::operator+=(const PolyMatrix& other) {
    PolyMatrix o = other.rebased(origin_);
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), Matrix::Zero(dimension_, dimension_));
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
}

void PolyMatrix::add_constant(const Matrix& c) { coeffs_[0] += c; }

// ---------------------------------------------------------------------------------------------
// HermitianPotential

HermitianPotential::HermitianPotential(int dimension, std::vector<PotentialPiece> pieces,
                                       std::vector<PotentialJump> jumps, std::optional<Periodicity> periodic)
    : dimension_(dimension), periodic_(periodic) {
    if (dimension < 1) throw ValidationError("potential dimension must be >= 1");
    if (pieces.empty()) throw ValidationError("potential needs at least one piece");

    for (std::size_t i = 0; i < pieces.size(); ++i) {
        auto& pc = pieces[i];
        if (!(pc.span.lo < pc.span.hi)) throw ValidationError("piece interval must satisfy lo < hi");
        if (pc.poly.dimension() != dimension) throw ValidationError("piece dimension mismatch");
        if (pc.poly.degree() > kMaxPieceDegree) {
            throw ValidationError("piece degree exceeds " + std::to_string(kMaxPieceDegree));
        }
        if (!std::isfinite(pc.poly.origin())) throw ValidationError("piece origin must be finite");
        std::vector<Matrix> coeffs;
        for (const auto& c : pc.poly.coeffs()) coeffs.push_back(checked_hermitian(c, dimension, "piece coefficient"));
        // Trailing zero coefficients only cost quadrature order.
        while (coeffs.size() > 1 && coeffs.back().isZero(0.0)) coeffs.pop_back();
        pc.poly = PolyMatrix(dimension, pc.poly.origin(), std::move(coeffs));
        if (i > 0 && pieces[i - 1].span.hi != pc.span.lo) {
            throw ValidationError("pieces must tile the support without gaps or overlaps");
        }
    }
    pieces_ = std::move(pieces);

    if (periodic_) {
        const auto& per = *periodic_;
        if (!(per.period > 0.0) || !std::isfinite(per.period) || !std::isfinite(per.cell_start)) {
            throw ValidationError("period must be positive and finite");
        }
        const double end = per.cell_start + per.period;
        const double tol = 1e-12 * std::max(1.0, std::abs(end));
        if (pieces_.front().span.lo != per.cell_start || std::abs(pieces_.back().span.hi - end) > tol) {
            throw ValidationError("periodic potential pieces must tile exactly one period cell");
        }
        pieces_.back().span.hi = end;
    }

    std::sort(jumps.begin(), jumps.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
    const Interval sup = support();
    for (auto& j : jumps) {
        if (!std::isfinite(j.x)) throw ValidationError("jump location must be finite");
        Matrix dq = checked_hermitian(j.dq, dimension, "jump matrix");
        const bool inside = periodic_ ? (j.x >= sup.lo && j.x < sup.hi) : (j.x >= sup.lo && j.x <= sup.hi);
        if (!inside) throw ValidationError("jump location outside the potential's support");
        if (!jumps_.empty() && jumps_.back().x == j.x) {
            jumps_.back().dq += dq;
        } else {
            jumps_.push_back({j.x, std::move(dq)});
        }
    }
    jump_prefix_.reserve(jumps_.size() + 1);
    jump_prefix_.push_back(Matrix::Zero(dimension, dimension));
    for (const auto& j : jumps_) jump_prefix_.push_back(jump_prefix_.back() + j.dq);

    drift_ = Matrix::Zero(dimension, dimension);
    if (periodic_) {
        const auto& first = pieces_.front();
        const auto& last = pieces_.back();
        drift_ = last.poly(last.span.hi) - first.poly(first.span.lo) + jump_prefix_.back();
        drift_ = symmetrized(drift_);
    }
}

HermitianPotential HermitianPotential::zero(int dimension) {
    if (dimension < 1) throw ValidationError("potential dimension must be >= 1");
    PotentialPiece pc{{-kInf, kInf}, PolyMatrix::constant(Matrix::Zero(dimension, dimension))};
    return HermitianPotential(dimension, {pc}, {});
}

HermitianPotential HermitianPotential::from_polynomial_pieces(int dimension, const std::vector<PieceSpec>& specs,
                                                              std::vector<PotentialJump> jumps,
                                                              std::optional<Periodicity> periodic) {
    std::vector<PotentialPiece> pieces;
    pieces.reserve(specs.size());
    for (const auto& s : specs) {
        if (static_cast<int>(s.coeffs.size()) > kMaxPieceDegree + 1) {
            throw ValidationError("piece degree exceeds " + std::to_string(kMaxPieceDegree));
        }
        pieces.push_back({{s.lo, s.hi}, PolyMatrix(dimension, s.origin.value_or(0.0), s.coeffs)});
    }
    return HermitianPotential(dimension, std::move(pieces), std::move(jumps), periodic);
}

HermitianPotential HermitianPotential::delta_comb(int dimension, const std::vector<double>& locations,
                                                  const std::vector<Matrix>& strengths,
                                                  std::optional<Periodicity> periodic) {
    if (locations.size() != strengths.size()) {
        throw ValidationError("delta comb needs one strength per location");
    }
    std::vector<PotentialJump> jumps;
    for (std::size_t i = 0; i < locations.size(); ++i) jumps.push_back({locations[i], strengths[i]});
    Interval span{-kInf, kInf};
    if (periodic) span = {periodic->cell_start, periodic->cell_start + periodic->period};
    PotentialPiece pc{span, PolyMatrix::constant(Matrix::Zero(dimension, dimension))};
    return HermitianPotential(dimension, {pc}, std::move(jumps), periodic);
}

HermitianPotential HermitianPotential::antiderivative_of_samples(const std::vector<double>& x,
                                                                 const std::vector<Matrix>& q) {
    if (x.size() < 2) throw ValidationError("need at least two samples");
    if (x.size() != q.size()) throw ValidationError("sample grid and values differ in length");
    const int m = static_cast<int>(q.front().rows());
    if (m < 1) throw ValidationError("sample matrices must be non-empty");
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (!(x[i] < x[i + 1]) || !std::isfinite(x[i]) || !std::isfinite(x[i + 1])) {
            throw ValidationError("sample grid must be finite and strictly increasing");
        }
    }
    std::vector<Matrix> qs;
    qs.reserve(q.size());
    for (const auto& v : q) qs.push_back(checked_hermitian(v, m, "sample of q"));

    std::vector<PotentialPiece> pieces;
    pieces.reserve(x.size() - 1);
    Matrix acc = Matrix::Zero(m, m);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        Matrix next = acc + 0.5 * h * (qs[i] + qs[i + 1]);
        Matrix slope = (next - acc) / h;
        pieces.push_back({{x[i], x[i + 1]}, PolyMatrix(m, x[i], {acc, slope})});
        acc = std::move(next);
    }
    return HermitianPotential(m, std::move(pieces), {});
}

Interval HermitianPotential::support() const {
    // For periodic potentials this is the base cell.
    return {pieces_.front().span.lo, pieces_.back().span.hi};
}

bool HermitianPotential::covers(Interval iv) const {
    if (periodic_) return std::isfinite(iv.lo) && std::isfinite(iv.hi);
    const Interval s = support();
    return s.lo <= iv.lo && iv.hi <= s.hi;
}

bool HermitianPotential::is_real_symmetric() const {
    for (const auto& pc : pieces_) {
        for (const auto& c : pc.poly.coeffs()) {
            if (!c.imag().isZero(0.0)) return false;
        }
    }
    for (const auto& j : jumps_) {
        if (!j.dq.imag().isZero(0.0)) return false;
    }
    return true;
}

int HermitianPotential::max_degree() const {
    int d = 0;
    for (const auto& pc : pieces_) d = std::max(d, pc.poly.degree());
    return d;
}

HermitianPotential::Located HermitianPotential::locate(double x) const {
    if (!std::isfinite(x)) throw DomainError("evaluation point must be finite");
    long cell = 0;
    double local = x;
    if (periodic_) {
        const double c = periodic_->cell_start;
        const double p = periodic_->period;
        cell = static_cast<long>(std::floor((x - c) / p));
        local = x - static_cast<double>(cell) * p;
        if (local < c) {
            --cell;
            local += p;
        } else if (local >= c + p) {
            ++cell;
            local -= p;
        }
    } else {
        const Interval s = support();
        if (x < s.lo || x > s.hi) {
            std::ostringstream msg;
            msg << "x = " << x << " outside potential support [" << s.lo << ", " << s.hi << "]";
            throw DomainError(msg.str());
        }
    }
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), local,
                               [](double v, const PotentialPiece& pc) { return v < pc.span.lo; });
    const PotentialPiece* piece = (it == pieces_.begin()) ? &pieces_.front() : &*std::prev(it);
    return {piece, cell, local};
}

Matrix HermitianPotential::jump_sum_upto(double local_x) const {
    auto it = std::upper_bound(jumps_.begin(), jumps_.end(), local_x,
                               [](double v, const PotentialJump& j) { return v < j.x; });
    return jump_prefix_[static_cast<std::size_t>(it - jumps_.begin())];
}

Matrix HermitianPotential::at(double x) const {
    const Located loc = locate(x);
    Matrix q = loc.piece->poly(loc.local);
    q += jump_sum_upto(loc.local);
    if (loc.cell != 0) q += static_cast<double>(loc.cell) * drift_;
    return q;
}

Matrix HermitianPotential::squared_at(double x) const {
    const Matrix q = at(x);
    return symmetrized(q * q);
}

std::vector<double> HermitianPotential::breakpoints_in(Interval iv) const {
    std::vector<double> base;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) base.push_back(pieces_[i].span.hi);
    for (const auto& j : jumps_) base.push_back(j.x);

    std::vector<double> out;
    auto keep = [&](double v) {
        if (v > iv.lo && v < iv.hi) out.push_back(v);
    };
    if (periodic_) {
        const double c = periodic_->cell_start;
        const double p = periodic_->period;
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
            throw DomainError("breakpoints of a periodic potential need a finite interval");
        }
        const long k0 = static_cast<long>(std::floor((iv.lo - c) / p)) - 1;
        const long k1 = static_cast<long>(std::floor((iv.hi - c) / p)) + 1;
        for (long k = k0; k <= k1; ++k) {
            const double shift = static_cast<double>(k) * p;
            keep(c + shift);
            for (double b : base) keep(b + shift);
        }
    } else {
        for (double b : base) keep(b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PolyMatrix HermitianPotential::segment(Interval iv) const {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
        throw DomainError("segment must be a finite, nonempty interval");
    }
    if (!covers(iv)) throw DomainError("segment outside potential support");
    const Located loc = locate(0.5 * (iv.lo + iv.hi));
    const double shift = periodic_ ? static_cast<double>(loc.cell) * periodic_->period : 0.0;
    const PolyMatrix& base = loc.piece->poly;
    PolyMatrix poly(dimension_, base.origin() + shift, base.coeffs());
    Matrix offset = jump_sum_upto(loc.local);
    if (loc.cell != 0) offset += static_cast<double>(loc.cell) * drift_;
    poly.add_constant(offset);
    return poly;
}

// ---------------------------------------------------------------------------------------------
// Transformations

HermitianPotential shifted(const HermitianPotential& p, double c) {
    const int m = p.dimension();
    const Matrix id = Matrix::Identity(m, m);
    std::vector<PotentialPiece> pieces = p.pieces();
    for (auto& pc : pieces) {
        std::vector<Matrix> coeffs = pc.poly.coeffs();
        if (coeffs.size() < 2) coeffs.push_back(Matrix::Zero(m, m));
        coeffs[0] += (c * pc.poly.origin()) * id;
        coeffs[1] += c * id;
        pc.poly = PolyMatrix(m, pc.poly.origin(), std::move(coeffs));
    }
    return HermitianPotential(m, std::move(pieces), p.jumps(), p.periodicity());
}

HermitianPotential gauge_shifted(const HermitianPotential& p, const Matrix& c) {
    std::vector<PotentialPiece> pieces = p.pieces();
    for (auto& pc : pieces) pc.poly.add_constant(c);
    return HermitianPotential(p.dimension(), std::move(pieces), p.jumps(), p.periodicity());
}

HermitianPotential conjugated(const HermitianPotential& p, const Matrix& u) {
    const int m = p.dimension();
    if (u.rows() != m || u.cols() != m) throw ValidationError("unitary has wrong shape");
    if ((u * u.adjoint() - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-12) {
        throw ValidationError("conjugating matrix is not unitary");
    }
    auto conj = [&](const Matrix& a) { return symmetrized(u * a * u.adjoint()); };
    std::vector<PotentialPiece> pieces = p.pieces();
    for (auto& pc : pieces) {
        std::vector<Matrix> coeffs;
        for (const auto& c : pc.poly.coeffs()) coeffs.push_back(conj(c));
        pc.poly = PolyMatrix(m, pc.poly.origin(), std::move(coeffs));
    }
    std::vector<PotentialJump> jumps = p.jumps();
    for (auto& j : jumps) j.dq = conj(j.dq);
    return HermitianPotential(m, std::move(pieces), std::move(jumps), p.periodicity());
}

HermitianPotential direct_sum(const HermitianPotential& a, const HermitianPotential& b) {
    const auto& pa = a.periodicity();
    const auto& pb = b.periodicity();
    if (pa.has_value() != pb.has_value() ||
        (pa && (pa->period != pb->period || pa->cell_start != pb->cell_start))) {
        throw ValidationError("direct sum needs matching periodicity");
    }
    const Interval sa = a.support();
    const Interval sb = b.support();
    const Interval sup{std::max(sa.lo, sb.lo), std::min(sa.hi, sb.hi)};
    if (!(sup.lo < sup.hi)) throw ValidationError("direct sum of potentials with disjoint supports");

    std::vector<double> cuts{sup.lo, sup.hi};
    for (const auto* p : {&a, &b}) {
        for (const auto& pc : p->pieces()) {
            for (double v : {pc.span.lo, pc.span.hi}) {
                if (v > sup.lo && v < sup.hi) cuts.push_back(v);
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto piece_at = [](const HermitianPotential& p, double x) -> const PolyMatrix& {
        for (const auto& pc : p.pieces()) {
            if (x >= pc.span.lo && x < pc.span.hi) return pc.poly;
        }
        return p.pieces().back().poly;
    };

    const int ma = a.dimension();
    const int mb = b.dimension();
    std::vector<PotentialPiece> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double x = interior_point(cuts[i], cuts[i + 1]);
        const PolyMatrix& qa = piece_at(a, x);
        const PolyMatrix qb = piece_at(b, x).rebased(qa.origin());
        const int deg = std::max(qa.degree(), qb.degree());
        std::vector<Matrix> coeffs;
        for (int k = 0; k <= deg; ++k) {
            Matrix ca = k <= qa.degree() ? qa.coeffs()[k] : Matrix::Zero(ma, ma);
            Matrix cb = k <= qb.degree() ? qb.coeffs()[k] : Matrix::Zero(mb, mb);
            coeffs.push_back(block_diag(ca, cb));
        }
        pieces.push_back({{cuts[i], cuts[i + 1]}, PolyMatrix(ma + mb, qa.origin(), std::move(coeffs))});
    }
    std::vector<PotentialJump> jumps;
    for (const auto& j : a.jumps()) jumps.push_back({j.x, block_diag(j.dq, Matrix::Zero(mb, mb))});
    for (const auto& j : b.jumps()) jumps.push_back({j.x, block_diag(Matrix::Zero(ma, ma), j.dq)});
    return HermitianPotential(ma + mb, std::move(pieces), std::move(jumps), pa);
}

}  // namespace locspec
