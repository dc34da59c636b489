#include "vpcalc/smooth.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include "vpcalc/errors.hpp"

namespace vpcalc {

SmoothPtr SmoothFn::derivative(int arg_index) const {
    // No exact derivative available; fall back to finite differences.
    // The shared_ptr aliasing is safe because SmoothFn instances are
    // only handled through shared_ptr in this library.
    throw MissingDerivatives("finite-difference derivative requires a shared handle; "
                             "use derivative_of()");
    (void)arg_index;
}

std::pair<double, double> SmoothFn::support(int) const { return {0.0, 1.0}; }

bool SmoothFn::is_constant(double*) const { return false; }
bool SmoothFn::is_zero() const { return false; }

SmoothPtr ConstFn::derivative(int) const {
    return std::make_shared<ConstFn>(Rational(0), arity_);
}

bool ConstFn::equals(const SmoothFn& other) const {
    if (auto* c = dynamic_cast<const ConstFn*>(&other)) return c->value_ == value_;
    return false;
}

PolySmooth::PolySmooth(int arity, Monomials monomials, std::string name)
    : arity_(arity), name_(std::move(name)) {
    for (auto& [key, c] : monomials) {
        if (static_cast<int>(key.size()) != arity)
            throw Error("polynomial exponent vector has wrong length");
        if (!c.is_zero()) monomials_[key] = std::move(c);
    }
}

std::shared_ptr<const PolySmooth> PolySmooth::constant(int arity, Rational c) {
    Monomials m;
    if (!c.is_zero()) m[std::vector<int>(arity, 0)] = std::move(c);
    return std::make_shared<PolySmooth>(arity, std::move(m));
}

std::shared_ptr<const PolySmooth> PolySmooth::coordinate(int arity, int index) {
    Monomials m;
    std::vector<int> key(arity, 0);
    key[index] = 1;
    m[key] = Rational(1);
    return std::make_shared<PolySmooth>(arity, std::move(m));
}

double PolySmooth::eval(std::span<const double> args) const {
    if (static_cast<int>(args.size()) != arity_)
        throw Error("polynomial called with wrong number of arguments");
    double r = 0.0;
    for (const auto& [key, c] : monomials_) {
        double m = c.to_double();
        for (int i = 0; i < arity_; ++i) {
            for (int e = 0; e < key[i]; ++e) m *= args[i];
        }
        r += m;
    }
    return r;
}

SmoothPtr PolySmooth::derivative(int arg_index) const { return exact_derivative(arg_index); }

std::shared_ptr<const PolySmooth> PolySmooth::exact_derivative(int arg_index) const {
    std::scoped_lock lock(cache_mutex_);
    auto it = deriv_cache_.find(arg_index);
    if (it != deriv_cache_.end()) return it->second;
    Monomials m;
    for (const auto& [key, c] : monomials_) {
        if (key[arg_index] == 0) continue;
        std::vector<int> k = key;
        Rational nc = c * Rational(k[arg_index]);
        k[arg_index] -= 1;
        auto jt = m.find(k);
        if (jt == m.end()) {
            m[k] = std::move(nc);
        } else {
            jt->second += nc;
            if (jt->second.is_zero()) m.erase(jt);
        }
    }
    auto d = std::make_shared<PolySmooth>(arity_, std::move(m), name_ + "'");
    deriv_cache_[arg_index] = d;
    return d;
}

bool PolySmooth::is_constant(double* value) const {
    if (monomials_.empty()) {
        if (value) *value = 0.0;
        return true;
    }
    if (monomials_.size() == 1) {
        const auto& [key, c] = *monomials_.begin();
        for (int e : key)
            if (e != 0) return false;
        if (value) *value = c.to_double();
        return true;
    }
    return false;
}

bool PolySmooth::equals(const SmoothFn& other) const {
    if (this == &other) return true;
    if (auto* p = dynamic_cast<const PolySmooth*>(&other))
        return p->arity_ == arity_ && p->monomials_ == monomials_;
    return false;
}

int PolySmooth::degree() const {
    int d = 0;
    for (const auto& [key, c] : monomials_) {
        int t = 0;
        for (int e : key) t += e;
        d = std::max(d, t);
    }
    return d;
}

std::shared_ptr<const PolySmooth> operator*(const PolySmooth& a, const PolySmooth& b) {
    if (a.arity_ != b.arity_) throw Error("polynomial product with mismatched arity");
    PolySmooth::Monomials m;
    for (const auto& [ka, ca] : a.monomials_) {
        for (const auto& [kb, cb] : b.monomials_) {
            std::vector<int> k(a.arity_);
            for (int i = 0; i < a.arity_; ++i) k[i] = ka[i] + kb[i];
            Rational c = ca * cb;
            auto it = m.find(k);
            if (it == m.end()) {
                m[k] = std::move(c);
            } else {
                it->second += c;
                if (it->second.is_zero()) m.erase(it);
            }
        }
    }
    return std::make_shared<PolySmooth>(a.arity_, std::move(m), a.name_);
}

std::shared_ptr<const PolySmooth> operator+(const PolySmooth& a, const PolySmooth& b) {
    if (a.arity_ != b.arity_) throw Error("polynomial sum with mismatched arity");
    PolySmooth::Monomials m = a.monomials_;
    for (const auto& [k, c] : b.monomials_) {
        auto it = m.find(k);
        if (it == m.end()) {
            m[k] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) m.erase(it);
        }
    }
    return std::make_shared<PolySmooth>(a.arity_, std::move(m), a.name_);
}

OpaqueFn::OpaqueFn(int arity, std::function<double(std::span<const double>)> fn,
                   std::string name, int max_order)
    : arity_(arity), fn_(std::move(fn)), name_(std::move(name)), max_order_(max_order) {}

FdDerivFn::FdDerivFn(SmoothPtr base, int arg_index, int order)
    : base_(std::move(base)), arg_index_(arg_index), order_(order) {
    if (order_ < 1) throw Error("finite-difference derivative of nonpositive order");
}

namespace {

double central_stencil(const SmoothFn& f, std::span<const double> args, int idx, int order,
                       double h) {
    // k-th central difference: h^-k * sum_j (-1)^j C(k,j) f(x + (k/2 - j) h)
    std::vector<double> pt(args.begin(), args.end());
    double sum = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= order; ++j) {
        pt[idx] = args[idx] + (0.5 * order - j) * h;
        sum += ((j % 2 == 0) ? 1.0 : -1.0) * binom * f.eval(pt);
        binom = binom * (order - j) / (j + 1);
    }
    return sum / std::pow(h, order);
}

} // namespace

double FdDerivFn::eval(std::span<const double> args) const {
    const double eps = std::numeric_limits<double>::epsilon();
    const double scale = std::max(1.0, std::abs(args[arg_index_]));
    const double h = std::pow(eps, 1.0 / (order_ + 2)) * scale;
    // One Richardson refinement of the O(h^2) central stencil.
    const double d1 = central_stencil(*base_, args, arg_index_, order_, h);
    const double d2 = central_stencil(*base_, args, arg_index_, order_, h / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

SmoothPtr FdDerivFn::derivative(int arg_index) const {
    if (arg_index == arg_index_)
        return std::make_shared<FdDerivFn>(base_, arg_index_, order_ + 1);
    return std::make_shared<FdDerivFn>(std::make_shared<FdDerivFn>(base_, arg_index_, order_),
                                       arg_index, 1);
}

int FdDerivFn::max_derivative_order() const {
    return std::max(0, base_->max_derivative_order() - order_);
}

std::string FdDerivFn::name() const {
    return base_->name() + "^(" + std::to_string(order_) + ":" + std::to_string(arg_index_) + ")";
}

SmoothPtr derivative_of(const SmoothPtr& fn, int arg_index, int order) {
    if (order == 0) return fn;
    if (order > fn->max_derivative_order())
        throw MissingDerivatives("derivative of order " + std::to_string(order) +
                                 " unavailable for " + fn->name());
    SmoothPtr cur = fn;
    for (int k = 0; k < order; ++k) {
        if (dynamic_cast<const PolySmooth*>(cur.get()) ||
            dynamic_cast<const ConstFn*>(cur.get()) ||
            dynamic_cast<const FdDerivFn*>(cur.get())) {
            cur = cur->derivative(arg_index);
        } else {
            cur = std::make_shared<FdDerivFn>(cur, arg_index, 1);
        }
    }
    return cur;
}

std::shared_ptr<const PolySmooth> random_test_poly(std::mt19937_64& rng, int arity, int degree,
                                                   int taper) {
    std::uniform_int_distribution<int> coeff_dist(-1000, 1000);

    // All exponent vectors with total degree <= degree.
    PolySmooth::Monomials m;
    std::vector<int> key(arity, 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == arity) {
            m[key] = Rational(coeff_dist(rng), 1000);
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            key[pos] = e;
            self(self, pos + 1, remaining - e);
        }
        key[pos] = 0;
    };
    rec(rec, 0, degree);
    std::shared_ptr<const PolySmooth> p = std::make_shared<PolySmooth>(arity, std::move(m), "u");

    if (taper > 0) {
        // prod_i (x_i (1 - x_i))^taper
        PolySmooth::Monomials one;
        one[std::vector<int>(arity, 0)] = Rational(1);
        std::shared_ptr<const PolySmooth> t =
            std::make_shared<PolySmooth>(arity, std::move(one), "u");
        for (int i = 0; i < arity; ++i) {
            PolySmooth::Monomials f;
            std::vector<int> k1(arity, 0), k2(arity, 0);
            k1[i] = 1;
            k2[i] = 2;
            f[k1] = Rational(1);
            f[k2] = Rational(-1);
            PolySmooth fac(arity, std::move(f), "t");
            for (int j = 0; j < taper; ++j) t = *t * fac;
        }
        p = *t * *p;
    }
    return p;
}

} // namespace vpcalc
