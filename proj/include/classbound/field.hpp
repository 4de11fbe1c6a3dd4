#ifndef CLASSBOUND_FIELD_HPP
#define CLASSBOUND_FIELD_HPP

#include <gmpxx.h>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "classbound/error.hpp"
#include "classbound/modular.hpp"
#include "classbound/mp.hpp"
#include "classbound/roots.hpp"
#include "classbound/splitting.hpp"

namespace classbound {

using json = nlohmann::json;
using QVector = std::vector<mpq_class>;

inline const std::string power_basis_tag = "power";

struct IntegralBasis {
    std::string name;
    std::vector<QVector> elements; // power-basis coordinates, one row per element
    std::string provenance;
};

/// Element of the field as rational coordinates on a named basis.
struct AlgebraicInteger {
    QVector coords;
    std::string basis_tag = power_basis_tag;
};

struct NumberField {
    ZPoly defining_poly;
    int degree = 0;
    int num_real = 0;
    int num_complex_pairs = 0;
    RootIsolation roots;
    std::optional<IntegralBasis> integral_basis;
    std::optional<std::string> galois_group;
    std::optional<ZPoly> splitting_poly;         // set when the field is the splitting field of this
    std::optional<std::vector<std::uint64_t>> ramified_primes; // declared ramification of the field
    mpz_class poly_discriminant;
    std::optional<mpz_class> discriminant;     // field discriminant, when declared

    mp::prec_t precision() const { return roots.precision; }
    bool totally_complex() const { return num_real == 0; }

    /// Conservative ramification test: the declared set when there is one,
    /// otherwise "p divides disc(f)" (which also catches index divisors).
    bool possibly_ramified(std::uint64_t p) const {
        if (ramified_primes) return std::find(ramified_primes->begin(), ramified_primes->end(), p) != ramified_primes->end();
        return modular::reduce(poly_discriminant, p) == 0;
    }
};

// ---------------------------------------------------------------------------
// Parsing helpers shared by the file formats.

inline mpz_class parse_integer(const json& j) {
    if (j.is_number_integer()) return mpz_class(j.dump());
    if (j.is_string()) {
        mpz_class z;
        if (z.set_str(j.get<std::string>(), 10) != 0) throw invalid_input("not an integer: " + j.dump());
        return z;
    }
    throw invalid_input("expected an integer, got " + j.dump());
}

inline mpq_class parse_rational(const json& j) {
    if (j.is_number_integer()) return mpq_class(parse_integer(j));
    if (!j.is_string()) throw invalid_input("expected a rational \"p/q\", got " + j.dump());
    mpq_class q;
    if (q.set_str(j.get<std::string>(), 10) != 0) throw invalid_input("not a rational: " + j.dump());
    if (q.get_den() == 0) throw invalid_input("zero denominator: " + j.dump());
    q.canonicalize();
    return q;
}

inline ZPoly parse_poly(const json& j) {
    if (!j.is_array() || j.empty()) throw invalid_input("polynomial must be a nonempty coefficient array");
    ZPoly f;
    for (const auto& c : j) f.push_back(parse_integer(c));
    while (f.size() > 1 && f.back() == 0) f.pop_back();
    return f;
}

/// Integers that fit in 64 bits are written as JSON numbers, others as strings.
inline json integer_to_json(const mpz_class& z) {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
}

inline json poly_to_json(const ZPoly& f) {
    json a = json::array();
    for (const auto& c : f) a.push_back(integer_to_json(c));
    return a;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw invalid_input("'" + path + "' is not valid JSON: " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Exact polynomial arithmetic.

/// Bits needed to hold |Res(f, g)| for monic f: Hadamard on the Sylvester matrix.
inline double resultant_bound_bits(const ZPoly& f, const ZPoly& g) {
    auto norm_bits = [](const ZPoly& p) {
        mpz_class s = 0;
        for (const auto& c : p) s += c * c;
        return 0.5 * static_cast<double>(mpz_sizeinbase(s.get_mpz_t(), 2)) + 0.5;
    };
    const double df = static_cast<double>(f.size() - 1), dg = static_cast<double>(g.size() - 1);
    return dg * norm_bits(f) + df * norm_bits(g) + 2;
}

/// Res(f, g) = prod_{f(a)=0} g(a) for monic f, by CRT over word primes.
inline mpz_class resultant_monic(const ZPoly& f, const ZPoly& g) {
    if (f.empty() || f.back() != 1) throw invalid_input("resultant_monic needs a monic first argument");
    const double bits = resultant_bound_bits(f, g);
    modular::LargePrimes primes;
    modular::CrtAccumulator crt;
    for (std::size_t i = 0; static_cast<double>(crt.bits()) < bits + 2; ++i) {
        const auto p = primes.at(i);
        crt.add(modular::resultant(modular::reduce_poly(f, p), modular::reduce_poly(g, p), p), p);
    }
    return crt.symmetric();
}

inline ZPoly derivative(const ZPoly& f) {
    ZPoly d;
    for (std::size_t i = 1; i < f.size(); ++i) d.push_back(f[i] * static_cast<unsigned long>(i));
    if (d.empty()) d.push_back(0);
    return d;
}

inline mpz_class poly_discriminant(const ZPoly& f) {
    const std::size_t n = f.size() - 1;
    mpz_class r = resultant_monic(f, derivative(f));
    if ((n * (n - 1) / 2) % 2 == 1) r = -r;
    return r;
}

/// a * b mod f over Q, f monic.
inline QVector mul_mod(const QVector& a, const QVector& b, const ZPoly& f) {
    const std::size_t n = f.size() - 1;
    QVector prod(a.size() + b.size() - 1, mpq_class(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] += a[i] * b[j];
    }
    for (std::size_t k = prod.size(); k-- > n;) {
        if (prod[k] == 0) continue;
        const mpq_class c = prod[k];
        for (std::size_t j = 0; j <= n; ++j) prod[k - n + j] -= c * f[j];
    }
    prod.resize(n, mpq_class(0));
    return prod;
}

// ---------------------------------------------------------------------------

/// Power-basis coordinates of an element.
inline QVector to_power_basis(const AlgebraicInteger& a, const NumberField& field) {
    if (static_cast<int>(a.coords.size()) != field.degree)
        throw invalid_input("element has " + std::to_string(a.coords.size()) + " coordinates, field degree is " +
                            std::to_string(field.degree));
    if (a.basis_tag == power_basis_tag) return a.coords;
    if (!field.integral_basis || field.integral_basis->name != a.basis_tag)
        throw invalid_input("no conversion registered from basis '" + a.basis_tag + "' to the power basis");
    QVector out(field.degree, mpq_class(0));
    const auto& rows = field.integral_basis->elements;
    for (int i = 0; i < field.degree; ++i) {
        if (a.coords[i] == 0) continue;
        for (int k = 0; k < field.degree; ++k) out[k] += a.coords[i] * rows[i][k];
    }
    return out;
}

inline AlgebraicInteger element_mul(const AlgebraicInteger& a, const AlgebraicInteger& b, const NumberField& field) {
    return {mul_mod(to_power_basis(a, field), to_power_basis(b, field), field.defining_poly), power_basis_tag};
}

/// |N_{K/Q}(a)| exactly, as Res(f, d a) / d^n with d the common denominator.
inline mpq_class norm_exact(const AlgebraicInteger& a, const NumberField& field) {
    const QVector c = to_power_basis(a, field);
    mpz_class d = 1;
    for (const auto& q : c) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), q.get_den_mpz_t());
    ZPoly g;
    bool zero = true;
    for (const auto& q : c) {
        g.push_back(mpz_class(q * d));
        if (q != 0) zero = false;
    }
    if (zero) throw arithmetic_error("norm of the zero element");
    while (g.size() > 1 && g.back() == 0) g.pop_back();
    mpz_class r = abs(resultant_monic(field.defining_poly, g));
    mpz_class dn;
    mpz_pow_ui(dn.get_mpz_t(), d.get_mpz_t(), static_cast<unsigned long>(field.degree));
    mpq_class out(r, dn);
    out.canonicalize();
    return out;
}

/// sigma(a) for one root enclosure, by interval Horner.
inline mp::ComplexInterval evaluate_at_root(const QVector& power_coords, const RootEnclosure& root, mp::prec_t prec) {
    const mp::ComplexInterval z = root.box(prec);
    mp::ComplexInterval acc(prec);
    for (std::size_t k = power_coords.size(); k-- > 0;) {
        acc = acc * z;
        acc.re = acc.re + mp::Interval(power_coords[k], prec);
    }
    return acc;
}

/// Enclosure of |N(a)| = prod |sigma_i(a)| through the certified embeddings.
inline mp::Interval norm_enclosure(const AlgebraicInteger& a, const NumberField& field) {
    const QVector c = to_power_basis(a, field);
    const mp::prec_t prec = field.precision();
    mp::Interval n(1L, prec);
    for (const auto& r : field.roots.real_roots) {
        const auto v = evaluate_at_root(c, r, prec);
        n = n * sqrt(sqr(v.re));
    }
    for (const auto& r : field.roots.complex_roots) n = n * evaluate_at_root(c, r, prec).norm_sqr();
    return n;
}

/// The unique integer in an enclosure of width < 1/2, if there is one.
inline std::optional<mpz_class> unique_integer(const mp::Interval& iv) {
    if (!iv.is_finite()) return std::nullopt;
    mp::Real half(0.5, 53);
    if (!(iv.width() < half)) return std::nullopt;
    mpz_class lo, hi;
    mpfr_get_z(lo.get_mpz_t(), iv.lo().get(), MPFR_RNDU);
    mpfr_get_z(hi.get_mpz_t(), iv.hi().get(), MPFR_RNDD);
    if (lo != hi) return std::nullopt;
    return lo;
}

/// Integral norm from floating embeddings; throws a precision error if the
/// enclosure does not pin down a single integer.
inline mpz_class norm_certified(const AlgebraicInteger& a, const NumberField& field) {
    const auto iv = norm_enclosure(a, field);
    if (auto z = unique_integer(iv)) return *z;
    throw precision_error("norm enclosure too wide at " + std::to_string(field.precision()) +
                          " bits; raise precision or use the exact norm");
}

// ---------------------------------------------------------------------------

struct FieldOptions {
    mp::prec_t precision_bits = mp::default_precision;
    int squarefree_probes = 64;
};

/// Validate a defining polynomial and isolate its roots.
inline NumberField make_field(const ZPoly& f, const FieldOptions& opt = {}) {
    if (f.size() < 2) throw invalid_input("defining polynomial must have degree >= 1");
    if (f.back() != 1) throw invalid_input("defining polynomial is not monic");
    NumberField k;
    k.defining_poly = f;
    k.degree = static_cast<int>(f.size()) - 1;

    // Irreducibility is taken on trust; squarefreeness mod some prime at
    // least rules out repeated factors over Q.
    bool ok = false;
    int probed = 0;
    for (std::uint64_t p = 3; probed < opt.squarefree_probes && !ok; p += 2) {
        if (!modular::is_prime_u64(p)) continue;
        ++probed;
        ok = splitting_type(f, p).squarefree_mod_p;
    }
    if (!ok) throw invalid_input("defining polynomial is not squarefree modulo any probed prime");

    k.poly_discriminant = poly_discriminant(f);
    k.roots = isolate_roots(f, opt.precision_bits);
    k.num_real = static_cast<int>(k.roots.real_roots.size());
    k.num_complex_pairs = static_cast<int>(k.roots.complex_roots.size());
    return k;
}

/// Same field, roots re-isolated at another precision.
inline NumberField with_precision(const NumberField& field, mp::prec_t prec) {
    NumberField k = field;
    k.roots = isolate_roots(field.defining_poly, prec);
    return k;
}

/// n rows of n rational power-basis coordinates, checked nonsingular.
inline IntegralBasis parse_integral_basis(const json& b, int n, std::string name, std::string provenance) {
    if (!b.is_array() || static_cast<int>(b.size()) != n)
        throw invalid_input("degree mismatch: integral basis must have exactly " + std::to_string(n) + " elements");
    IntegralBasis basis;
    basis.name = std::move(name);
    basis.provenance = std::move(provenance);
    if (basis.name == power_basis_tag) throw invalid_input("integral basis may not be named 'power'");
    for (const auto& row : b) {
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw invalid_input("degree mismatch: integral basis element with wrong coordinate count");
        QVector v;
        for (const auto& x : row) v.push_back(parse_rational(x));
        basis.elements.push_back(std::move(v));
    }
    // Nonsingularity: scale to an integer matrix and take its determinant.
    mpz_class d = 1;
    for (const auto& row : basis.elements)
        for (const auto& q : row) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), q.get_den_mpz_t());
    std::vector<std::vector<mpz_class>> m;
    for (const auto& row : basis.elements) {
        std::vector<mpz_class> r;
        for (const auto& q : row) r.emplace_back(q * d);
        m.push_back(std::move(r));
    }
    if (modular::determinant(m) == 0) throw invalid_input("integral basis is singular");
    return basis;
}

/// Stand-alone basis file: {format_version, name, elements, provenance?}.
inline IntegralBasis integral_basis_from_json(const json& doc, int n) {
    if (!doc.is_object() || doc.value("format_version", 0) != 1)
        throw invalid_input("basis file: missing or unsupported format_version");
    if (!doc.contains("elements")) throw invalid_input("basis file needs 'elements'");
    return parse_integral_basis(doc.at("elements"), n, doc.value("name", std::string("integral")),
                                doc.value("provenance", std::string()));
}

/// Parse a field description document.
inline NumberField load_field(const json& doc, const FieldOptions& opt = {}) {
    if (!doc.is_object() || !doc.contains("defining_polynomial"))
        throw invalid_input("field description needs 'defining_polynomial'");
    if (doc.value("format_version", 0) != 1) throw invalid_input("field description: missing or unsupported format_version");
    const ZPoly f = parse_poly(doc.at("defining_polynomial"));
    const int n = static_cast<int>(f.size()) - 1;
    if (n >= 1 && f.back() != 1) throw invalid_input("defining polynomial is not monic");

    std::optional<std::pair<int, int>> signature;
    if (doc.contains("signature")) {
        const auto& s = doc.at("signature");
        if (!s.is_array() || s.size() != 2) throw invalid_input("'signature' must be [r1, r2]");
        signature = {s[0].get<int>(), s[1].get<int>()};
        if (signature->first + 2 * signature->second != n)
            throw invalid_input("degree mismatch: signature [" + std::to_string(signature->first) + ", " +
                                std::to_string(signature->second) + "] does not add up to degree " + std::to_string(n));
    }

    NumberField k = make_field(f, opt);
    if (signature && (signature->first != k.num_real || signature->second != k.num_complex_pairs))
        throw invalid_input("declared signature does not match the isolated roots");

    if (doc.contains("integral_basis"))
        k.integral_basis = parse_integral_basis(doc.at("integral_basis"), n,
                                                doc.value("integral_basis_name", std::string("integral")),
                                                doc.value("integral_basis_provenance", std::string()));
    if (doc.contains("galois_group")) k.galois_group = doc.at("galois_group").get<std::string>();
    if (doc.contains("is_splitting_field_of")) {
        k.splitting_poly = parse_poly(doc.at("is_splitting_field_of"));
        if (k.splitting_poly->back() != 1) throw invalid_input("'is_splitting_field_of' must be monic");
    }
    if (doc.contains("discriminant")) k.discriminant = parse_integer(doc.at("discriminant"));
    if (doc.contains("ramified_primes")) {
        std::vector<std::uint64_t> r;
        for (const auto& p : doc.at("ramified_primes")) r.push_back(p.get<std::uint64_t>());
        k.ramified_primes = std::move(r);
    }
    return k;
}

inline NumberField load_field_file(const std::string& path, const FieldOptions& opt = {}) {
    return load_field(read_json_file(path), opt);
}

/// Residue degree of p in the field, read off from the declared splitting
/// polynomial (lcm of factor degrees). Refused unless the field declares
/// itself the splitting field of that polynomial.
inline std::optional<int> residue_degree(const NumberField& field, std::uint64_t p) {
    if (!field.splitting_poly)
        throw unsupported("residue degrees need 'is_splitting_field_of' in the field description");
    return splitting_type(*field.splitting_poly, p).residue_degree;
}

} // namespace classbound

#endif // CLASSBOUND_FIELD_HPP
