#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "normcf/dinterval.hpp"
#include "normcf/errors.hpp"
#include "normcf/scalar.hpp"

namespace normcf {

struct SurdAlpha {
    Surd value;
};
struct PeriodicAlpha {
    mpz_class b0;
    std::vector<mpz_class> preperiod;
    std::vector<mpz_class> period;  // nonempty
};
struct ArithAlpha {
    mpz_class b0;
    mpz_class start;  // >= 1
    mpz_class step;   // >= 0
};
struct PrefixAlpha {
    mpz_class b0;
    std::vector<mpz_class> digits;
};
struct RandomAlpha {
    std::uint64_t seed;
};

using AlphaSpec = std::variant<SurdAlpha, PeriodicAlpha, ArithAlpha, PrefixAlpha, RandomAlpha>;

namespace detail {

/// Value of the purely periodic tail [q1; q2, ..., qk, repeat] as a surd.
inline Surd periodic_tail_surd(const std::vector<mpz_class>& period) {
    mpz_class m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    for (const mpz_class& q : period) {
        // multiply by [[q,1],[1,0]]
        mpz_class n00 = m00 * q + m01, n10 = m10 * q + m11;
        m01 = m00;
        m11 = m10;
        m00 = n00;
        m10 = n10;
    }
    // x = (m00 x + m01) / (m10 x + m11)
    mpz_class A = m10, B = m11 - m00, C = -m01;
    mpz_class disc = B * B - 4 * A * C;
    return Surd(-B, 1, disc, 2 * A);
}

inline Surd periodic_alpha_surd(const PeriodicAlpha& p) {
    if (p.period.empty()) throw SpecParseError("periodic alpha needs a nonempty period");
    Surd t = periodic_tail_surd(p.period);
    for (auto it = p.preperiod.rbegin(); it != p.preperiod.rend(); ++it)
        t = t.inverse().add_q(mpq_class(*it));
    Surd alpha = t.inverse().add_q(mpq_class(p.b0));
    return alpha;
}

}  // namespace detail

/// Regular continued fraction engine: digit stream, convergents (r_n, s_n),
/// tail values u_n and reversed values v_n. Single-writer, append-only.
class RegularCf {
  public:
    explicit RegularCf(AlphaSpec spec, long terms_hint = 64) : spec_(std::move(spec)) {
        if (auto* s = std::get_if<SurdAlpha>(&spec_)) {
            if (s->value.is_rational() || s->value.b() == 0)
                throw RationalAlphaError("alpha must be irrational");
            cq_.push_back(s->value);
        } else if (auto* p = std::get_if<PeriodicAlpha>(&spec_)) {
            for (const auto& d : p->preperiod)
                if (d < 1) throw SpecParseError("partial quotients must be >= 1");
            for (const auto& d : p->period)
                if (d < 1) throw SpecParseError("partial quotients must be >= 1");
            cq_.push_back(detail::periodic_alpha_surd(*p));
        } else if (auto* a = std::get_if<ArithAlpha>(&spec_)) {
            if (a->start < 1 || a->step < 0) throw SpecParseError("cf-arith requires start >= 1, step >= 0");
        } else if (auto* f = std::get_if<PrefixAlpha>(&spec_)) {
            for (const auto& d : f->digits)
                if (d < 1) throw SpecParseError("partial quotients must be >= 1");
            if (f->digits.empty()) throw SpecParseError("cf-prefix needs at least one digit");
        } else if (auto* r = std::get_if<RandomAlpha>(&spec_)) {
            rng_.seed(r->seed);
            extend_random_bits(std::max(512L, 4 * terms_hint + 512));
        }
    }

    bool surd_backed() const { return !cq_.empty(); }
    const AlphaSpec& spec() const { return spec_; }

    /// Digits b_0..b_n are available after this call.
    void ensure(long n) {
        while (static_cast<long>(digits_.size()) <= n) step();
    }

    const mpz_class& digit(long n) {
        ensure(n);
        return digits_[n];
    }
    long digit_l(long n) {
        ensure(n);
        if (!digits_[n].fits_slong_p()) throw CapExceeded("partial quotient exceeds machine range");
        return digits_[n].get_si();
    }
    long terms_generated() const { return static_cast<long>(digits_.size()); }

    const mpz_class& r(long n) {
        ensure(n);
        return r_[n];
    }
    const mpz_class& s(long n) {
        ensure(n);
        return s_[n];
    }

    /// v_n = s_{n-1}/s_n, exactly; v_0 = 0.
    mpq_class v(long n) {
        ensure(n);
        if (n == 0) return mpq_class(0);
        mpq_class q(s_[n - 1], s_[n]);
        q.canonicalize();
        return q;
    }

    /// Complete quotient A_n = [b_n; b_{n+1}, ...] (surd-backed streams only).
    const Surd& complete_quotient(long n) {
        if (!surd_backed()) throw PreconditionViolated("complete quotients need a surd-backed stream");
        ensure(n);
        return cq_[n];
    }

    /// u_n = [0; b_{n+1}, b_{n+2}, ...]; exact for surd-backed streams.
    Scalar u(long n) {
        ensure(n);
        if (surd_backed()) {
            ensure(n + 1);
            return Scalar(cq_[n + 1].inverse());
        }
        auto self = shared_from_this_safe();
        long idx = n;
        Interval box = u_enclosure(n, 96);
        return Scalar::approx(box, [self, idx](mpfr_prec_t p) { return self->u_enclosure(idx, p); });
    }

    std::pair<Scalar, Scalar> uv(long n) { return {u(n), Scalar(v(n))}; }

    /// Certified enclosure of u_n from the digit tail.
    Interval u_enclosure(long n, mpfr_prec_t prec) {
        // widen the window until the bracketing convergents of the tail agree
        // to the requested width
        long window = 8;
        mpq_class lo, hi;
        for (;;) {
            bool exhausted = false;
            long have = available_digits(n + window);
            if (have < n + window) {
                window = have - n;
                exhausted = true;
                if (window < 1) throw PrefixExhausted("no tail digits available for u_n");
            }
            // tail [0; b_{n+1}, ..., b_{n+window}] and the +1 variant bracket u_n
            mpq_class a = tail_value(n, window, 0);
            mpq_class b = tail_value(n, window, 1);
            lo = std::min(a, b);
            hi = std::max(a, b);
            mpq_class w = hi - lo;
            // w <= 2^-prec ?
            if (w <= 0 || mpz_sizeinbase(w.get_den().get_mpz_t(), 2) >=
                              mpz_sizeinbase(w.get_num().get_mpz_t(), 2) + static_cast<size_t>(prec) + 2)
                break;
            if (exhausted) break;  // best certified width achievable
            window *= 2;
        }
        return Interval::from_endpoints(Interval::from_mpq(lo, prec + 8), Interval::from_mpq(hi, prec + 8));
    }

    /// Fast double-interval u_n from a fixed tail window.
    DInterval u_dint(long n, int window = 48) {
        long have = available_digits(n + window);
        int w = static_cast<int>(std::min<long>(window, have - n));
        if (w < 1) throw PrefixExhausted("no tail digits available for u_n");
        DInterval x(static_cast<double>(digit_l(n + w)), static_cast<double>(digit_l(n + w)) + 1.0);
        for (long k = n + w - 1; k > n; --k)
            x = dint::add(DInterval(static_cast<double>(digit_l(k))), dint::div(DInterval(1.0), x));
        return dint::div(DInterval(1.0), x);
    }

    /// Enclosure of alpha itself.
    Scalar alpha_scalar() {
        if (surd_backed()) return Scalar(cq_[0]);
        auto self = shared_from_this_safe();
        return Scalar::approx(alpha_enclosure(96), [self](mpfr_prec_t p) { return self->alpha_enclosure(p); });
    }

    Interval alpha_enclosure(mpfr_prec_t prec) {
        ensure(1);
        Interval u0 = u_enclosure(0, prec + 4);
        return iv::add(Interval::from_mpz(digits_[0], prec + 4), u0, prec);
    }

    /// Integer nearest to alpha (alpha in [k-1/2, k+1/2)); exact via b_1.
    mpz_class nearest_int() {
        ensure(1);
        return digits_[1] == 1 ? mpz_class(digits_[0] + 1) : digits_[0];
    }

    /// (preperiod, period length) of the digit stream, detected exactly for
    /// surd-backed streams.
    std::optional<std::pair<long, long>> detect_period(long scan_limit = 4096) {
        if (!surd_backed()) return std::nullopt;
        if (period_) return period_;
        std::map<std::string, long> seen;
        for (long n = 1; n <= scan_limit; ++n) {
            ensure(n);
            std::string k = cq_[n].key();
            auto it = seen.find(k);
            if (it != seen.end()) {
                period_ = std::make_pair(it->second, n - it->second);
                return period_;
            }
            seen.emplace(std::move(k), n);
        }
        return std::nullopt;
    }

    /// Number of digits available up to the requested index (prefix streams
    /// saturate; others extend on demand).
    long available_digits(long upto) {
        if (auto* f = std::get_if<PrefixAlpha>(&spec_)) {
            long total = 1 + static_cast<long>(f->digits.size());
            long want = std::min(upto + 1, total);
            ensure(want - 1);
            return want;
        }
        ensure(upto);
        return upto + 1;
    }

    /// For random streams: the exact dyadic enclosure width exponent.
    long random_bits() const { return nbits_; }
    long ambiguous_extensions() const { return extensions_; }

    static std::shared_ptr<RegularCf> make(AlphaSpec spec, long terms_hint = 64) {
        auto sp = std::make_shared<RegularCf>(std::move(spec), terms_hint);
        sp->set_weak(sp);
        return sp;
    }

    std::shared_ptr<RegularCf> shared_from_this_safe() {
        if (auto sp = weak_.lock()) return sp;
        // not created through make(): fall back to an owning copy-free alias
        auto sp = std::shared_ptr<RegularCf>(this, [](RegularCf*) {});
        return sp;
    }
    void set_weak(const std::shared_ptr<RegularCf>& sp) { weak_ = sp; }

  private:
    void push_digit(mpz_class b) {
        long n = static_cast<long>(digits_.size());
        if (n > 0 && b < 1) throw RationalAlphaError("digit stream terminated: alpha rational");
        mpz_class rn = (n >= 1 ? r_[n - 1] : mpz_class(1)) * b + (n >= 2 ? r_[n - 2] : mpz_class(n == 1 ? 0 : 1));
        mpz_class sn = (n >= 1 ? s_[n - 1] : mpz_class(0)) * b + (n >= 2 ? s_[n - 2] : mpz_class(1));
        if (n == 0) {
            rn = b;
            sn = 1;
        } else if (n == 1) {
            rn = b * r_[0] + 1;
            sn = b;
        }
        digits_.push_back(std::move(b));
        r_.push_back(std::move(rn));
        s_.push_back(std::move(sn));
    }

    void step() {
        long n = static_cast<long>(digits_.size());
        if (surd_backed()) {
            Surd a = cq_[n];
            mpz_class b = a.floor();
            Surd frac = a.add_q(mpq_class(-b));
            cq_.push_back(frac.inverse());
            push_digit(std::move(b));
            return;
        }
        if (auto* a = std::get_if<ArithAlpha>(&spec_)) {
            push_digit(n == 0 ? a->b0 : mpz_class(a->start + a->step * (n - 1)));
            return;
        }
        if (auto* f = std::get_if<PrefixAlpha>(&spec_)) {
            if (n == 0) {
                push_digit(f->b0);
                return;
            }
            if (n > static_cast<long>(f->digits.size())) throw PrefixExhausted("cf-prefix digits exhausted");
            push_digit(f->digits[n - 1]);
            return;
        }
        // random stream
        if (n == 0) {
            push_digit(0);
            return;
        }
        for (;;) {
            if (euclid_plo_ != 0 && euclid_phi_ != 0) {
                mpz_class blo, bhi, tlo, thi;
                mpz_fdiv_qr(blo.get_mpz_t(), tlo.get_mpz_t(), euclid_qlo_.get_mpz_t(), euclid_plo_.get_mpz_t());
                mpz_fdiv_qr(bhi.get_mpz_t(), thi.get_mpz_t(), euclid_qhi_.get_mpz_t(), euclid_phi_.get_mpz_t());
                if (blo == bhi && tlo != 0 && thi != 0) {
                    // next interval endpoints swap orientation
                    mpz_class nplo = std::move(thi), nqlo = euclid_phi_;
                    mpz_class nphi = std::move(tlo), nqhi = euclid_plo_;
                    euclid_plo_ = std::move(nplo);
                    euclid_qlo_ = std::move(nqlo);
                    euclid_phi_ = std::move(nphi);
                    euclid_qhi_ = std::move(nqhi);
                    push_digit(std::move(blo));
                    return;
                }
            }
            ++extensions_;
            extend_random_bits(std::max(nbits_, 2048L));
        }
    }

    void extend_random_bits(long add) {
        long words = (add + 63) / 64;
        for (long i = 0; i < words; ++i) {
            mpz_mul_2exp(frac_.get_mpz_t(), frac_.get_mpz_t(), 64);
            frac_ += mpz_class(static_cast<unsigned long>(rng_()));
            nbits_ += 64;
        }
        rebuild_euclid();
    }

    void rebuild_euclid() {
        // alpha in (frac/2^N, (frac+1)/2^N); replay the digits already certified
        mpz_class Qlo = mpz_class(1) << static_cast<unsigned long>(nbits_);
        mpz_class Plo = frac_, Qhi = Qlo, Phi = frac_ + 1;
        // invariant: tail value lies in (Plo/Qlo, Phi/Qhi) -- stored inverted
        // as p/q with value = p/q in (0,1): p=num, q=den
        euclid_plo_ = Plo;
        euclid_qlo_ = Qlo;
        euclid_phi_ = Phi;
        euclid_qhi_ = Qhi;
        // replay already-extracted digits
        for (size_t i = 1; i < digits_.size(); ++i) {
            const mpz_class& b = digits_[i];
            // x -> 1/x - b on both endpoints, swapping
            mpz_class tlo = euclid_qlo_ - b * euclid_plo_;
            mpz_class thi = euclid_qhi_ - b * euclid_phi_;
            mpz_class nplo = thi, nqlo = euclid_phi_, nphi = tlo, nqhi = euclid_plo_;
            euclid_plo_ = nplo;
            euclid_qlo_ = nqlo;
            euclid_phi_ = nphi;
            euclid_qhi_ = nqhi;
        }
    }

    /// Exact value of [0; b_{n+1}, ..., b_{n+window} (+bump on the last)].
    mpq_class tail_value(long n, long window, int bump) {
        mpz_class num = 1, den = digits_[n + window] + bump;
        for (long k = n + window - 1; k > n; --k) {
            // x -> 1/(b_k + x): num/den -> den/(b_k den + num)
            mpz_class nden = digits_[k] * den + num;
            num = std::move(den);
            den = std::move(nden);
        }
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    }

    AlphaSpec spec_;
    std::vector<mpz_class> digits_;
    std::vector<mpz_class> r_, s_;
    std::vector<Surd> cq_;  // complete quotients, surd-backed streams
    std::optional<std::pair<long, long>> period_;

    // random stream state
    std::mt19937_64 rng_;
    mpz_class frac_;
    long nbits_ = 0;
    long extensions_ = 0;
    mpz_class euclid_plo_, euclid_qlo_, euclid_phi_, euclid_qhi_;

    std::weak_ptr<RegularCf> weak_;
};

/// First n regular partial quotients of alpha.
inline std::vector<mpz_class> digits(const AlphaSpec& alpha, long n) {
    if (n < 1) throw PreconditionViolated("digits: n >= 1 required");
    RegularCf cf(alpha, n);
    cf.ensure(n - 1);
    std::vector<mpz_class> out;
    out.reserve(n);
    for (long k = 0; k < n; ++k) out.push_back(cf.digit(k));
    return out;
}

/// Natural-extension map T(u, v).
inline std::pair<Scalar, Scalar> gauss_T(const Scalar& u, const Scalar& v) {
    if (u.is_exact_zero()) return {Scalar(0), Scalar(0)};
    Scalar inv = u.inverse();
    mpz_class k = inv.floor();  // may throw AmbiguousError at the cap
    return {inv - Scalar(k), (v + Scalar(k)).inverse()};
}

/// Invariant density of T: 1 / (log 2 * (1+uv)^2).
inline Scalar omega_density(const Scalar& u, const Scalar& v) {
    Scalar uv1 = Scalar(1) + u * v;
    Scalar denom = uv1 * uv1;
    Scalar ln2 = Scalar::approx(iv::const_ln2(128), [](mpfr_prec_t p) { return iv::const_ln2(p); });
    return (ln2 * denom).inverse();
}

/// Grammar: surd:a,b,d,c | cf:b0;p1,..;(q1,..) | cf-arith:b0;start,step |
///          cf-prefix:b0;d1,d2,.. | random:<seed>
inline AlphaSpec parse_alpha(const std::string& s);

namespace detail {

inline std::vector<mpz_class> parse_mpz_list(const std::string& s) {
    std::vector<mpz_class> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t c = s.find(',', pos);
        if (c == std::string::npos) c = s.size();
        std::string tok = s.substr(pos, c - pos);
        if (!tok.empty()) {
            try {
                out.emplace_back(tok);
            } catch (const std::invalid_argument&) {
                throw SpecParseError("bad integer: " + tok);
            }
        }
        pos = c + 1;
    }
    return out;
}

}  // namespace detail

inline AlphaSpec parse_alpha(const std::string& s) {
    auto need = [&](bool ok, const char* msg) {
        if (!ok) throw SpecParseError(std::string(msg) + ": " + s);
    };
    auto check_digits = [&](const std::vector<mpz_class>& ds) {
        for (const auto& d : ds)
            if (d < 1) throw SpecParseError("partial quotients must be >= 1: " + s);
    };
    if (s.rfind("surd:", 0) == 0) {
        auto parts = detail::parse_mpz_list(s.substr(5));
        need(parts.size() == 4, "surd:a,b,d,c needs four integers");
        if (parts[1] == 0) throw RationalAlphaError("surd alpha must be irrational (b != 0)");
        return SurdAlpha{Surd(parts[0], parts[1], parts[2], parts[3])};
    }
    if (s.rfind("cf-arith:", 0) == 0) {
        std::string rest = s.substr(9);
        size_t semi = rest.find(';');
        need(semi != std::string::npos, "cf-arith:b0;start,step");
        auto head = detail::parse_mpz_list(rest.substr(0, semi));
        auto tail = detail::parse_mpz_list(rest.substr(semi + 1));
        need(head.size() == 1 && tail.size() == 2, "cf-arith:b0;start,step");
        need(tail[0] >= 1 && tail[1] >= 0, "cf-arith requires start >= 1, step >= 0");
        return ArithAlpha{head[0], tail[0], tail[1]};
    }
    if (s.rfind("cf-prefix:", 0) == 0) {
        std::string rest = s.substr(10);
        size_t semi = rest.find(';');
        need(semi != std::string::npos, "cf-prefix:b0;d1,d2,...");
        auto head = detail::parse_mpz_list(rest.substr(0, semi));
        need(head.size() == 1, "cf-prefix:b0;d1,d2,...");
        auto ds = detail::parse_mpz_list(rest.substr(semi + 1));
        need(!ds.empty(), "cf-prefix needs at least one digit");
        check_digits(ds);
        return PrefixAlpha{head[0], std::move(ds)};
    }
    if (s.rfind("cf:", 0) == 0) {
        std::string rest = s.substr(3);
        size_t s1 = rest.find(';');
        need(s1 != std::string::npos, "cf:b0;pre;(period)");
        size_t s2 = rest.find(';', s1 + 1);
        need(s2 != std::string::npos, "cf:b0;pre;(period)");
        auto head = detail::parse_mpz_list(rest.substr(0, s1));
        need(head.size() == 1, "cf:b0;pre;(period)");
        std::string per = rest.substr(s2 + 1);
        need(per.size() >= 2 && per.front() == '(' && per.back() == ')', "period must be parenthesized");
        auto pre = detail::parse_mpz_list(rest.substr(s1 + 1, s2 - s1 - 1));
        auto cyc = detail::parse_mpz_list(per.substr(1, per.size() - 2));
        need(!cyc.empty(), "period must be nonempty");
        check_digits(pre);
        check_digits(cyc);
        return PeriodicAlpha{head[0], std::move(pre), std::move(cyc)};
    }
    if (s.rfind("random:", 0) == 0) {
        try {
            return RandomAlpha{static_cast<std::uint64_t>(std::stoull(s.substr(7)))};
        } catch (const std::exception&) {
            throw SpecParseError("bad seed: " + s);
        }
    }
    throw SpecParseError("unrecognized alpha spec: " + s);
}

inline std::string alpha_str(const AlphaSpec& a) {
    if (auto* s = std::get_if<SurdAlpha>(&a))
        return "surd:" + s->value.a().get_str() + "," + s->value.b().get_str() + "," + s->value.d().get_str() +
               "," + s->value.c().get_str();
    if (auto* p = std::get_if<PeriodicAlpha>(&a)) {
        std::string out = "cf:" + p->b0.get_str() + ";";
        for (size_t i = 0; i < p->preperiod.size(); ++i) out += (i ? "," : "") + p->preperiod[i].get_str();
        out += ";(";
        for (size_t i = 0; i < p->period.size(); ++i) out += (i ? "," : "") + p->period[i].get_str();
        return out + ")";
    }
    if (auto* q = std::get_if<ArithAlpha>(&a))
        return "cf-arith:" + q->b0.get_str() + ";" + q->start.get_str() + "," + q->step.get_str();
    if (auto* f = std::get_if<PrefixAlpha>(&a)) {
        std::string out = "cf-prefix:" + f->b0.get_str() + ";";
        for (size_t i = 0; i < f->digits.size(); ++i) out += (i ? "," : "") + f->digits[i].get_str();
        return out;
    }
    return "random:" + std::to_string(std::get<RandomAlpha>(a).seed);
}

}  // namespace normcf
