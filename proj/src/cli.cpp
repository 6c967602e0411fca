#include "phisig/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "phisig/arith.hpp"
#include "phisig/chain.hpp"
#include "phisig/errors.hpp"
#include "phisig/ford.hpp"
#include "phisig/linear_forms.hpp"
#include "phisig/stat_lab.hpp"
#include "phisig/structured.hpp"
#include "phisig/value_sets.hpp"

namespace phisig {

namespace {

// ---------------------------------------------------------------- parameters

std::string get_param(const RunConfig& c, const std::string& key,
                      const std::string& fallback) {
    auto it = c.parameters.find(key);
    return it == c.parameters.end() ? fallback : it->second;
}

bool has_param(const RunConfig& c, const std::string& key) {
    return c.parameters.count(key) > 0;
}

u64 to_u64(const std::string& text, const std::string& what) {
    if (text.empty() || text[0] == '-')
        throw std::domain_error("bad " + what + ": '" + text + "'");
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (errno == ERANGE)
        throw std::domain_error(what + " out of range: " + text);
    if (end == text.c_str() || *end != '\0')
        throw std::domain_error("bad " + what + ": '" + text + "'");
    return v;
}

double to_double(const std::string& text, const std::string& what) {
    if (text.empty()) throw std::domain_error(what + " is empty");
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE)
        throw std::domain_error("bad " + what + ": '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<u64> to_u64_list(const std::string& text, const std::string& what) {
    std::vector<u64> out;
    for (const auto& piece : split(text, ','))
        out.push_back(to_u64(piece, what));
    if (out.empty()) throw std::domain_error(what + " list is empty");
    return out;
}

std::pair<u64, u64> to_window(const std::string& text, const std::string& what) {
    auto pieces = split(text, ':');
    if (pieces.size() != 2)
        throw std::domain_error(what + " must look like lo:hi, got '" + text + "'");
    u64 lo = to_u64(pieces[0], what + " lower edge");
    u64 hi = to_u64(pieces[1], what + " upper edge");
    if (lo > hi) throw std::domain_error(what + " is empty: '" + text + "'");
    return {lo, hi};
}

// ---------------------------------------------------------------- emission

std::string jesc(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out.push_back(ch);
                }
        }
    }
    return out;
}

const char* jbool(bool b) { return b ? "true" : "false"; }

std::string jarr(const std::vector<u64>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    out += ']';
    return out;
}

std::string join_semicolon(const std::vector<u64>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(v[i]);
    }
    return out;
}

bool json_output(const RunConfig& c, bool default_json) {
    if (c.format == OutputFormat::json) return true;
    if (c.format == OutputFormat::csv) return false;
    return default_json;
}

PrimeTable make_table(const RunConfig& c, u64 needed) {
    u64 limit = c.sieve_limit ? c.sieve_limit : std::max<u64>(needed, 1000);
    return build_prime_table(limit);
}

// ---------------------------------------------------------------- values

void run_values(const RunConfig& c, std::ostream& out) {
    std::vector<u64> xs = to_u64_list(get_param(c, "x", "10"), "x");
    u64 max_x = 0;
    for (u64 x : xs) {
        if (x < 1) throw std::domain_error("x must be at least 1");
        max_x = std::max(max_x, x);
    }
    PrimeTable table = make_table(c, phi_preimage_bound(max_x));
    bool js = json_output(c, false);
    if (!js) out << "x,v_phi,v_sigma,v_common\n";
    for (u64 x : xs) {
        ValueSetSummary s = common_value_count(x, table, c.threads);
        if (js)
            out << "{\"x\":" << s.x << ",\"v_phi\":" << s.v_phi
                << ",\"v_sigma\":" << s.v_sigma << ",\"v_common\":" << s.v_common
                << "}\n";
        else
            out << s.x << ',' << s.v_phi << ',' << s.v_sigma << ','
                << s.v_common << '\n';
    }
}

// ---------------------------------------------------------------- holder

void run_holder(const RunConfig& c, std::ostream& out) {
    std::vector<u64> xs = to_u64_list(get_param(c, "x", "1"), "x");
    u64 max_x = 0;
    for (u64 x : xs) {
        if (x < 1) throw std::domain_error("x must be at least 1");
        max_x = std::max(max_x, x);
    }
    PrimeTable table = make_table(c, phi_preimage_bound(max_x));
    bool js = json_output(c, false);
    if (!js) out << "x,v_common,lhs,rhs,sum_rr,sum_r2r,sum_rr2,holds\n";
    for (u64 x : xs) {
        HolderReport r = holder_check(x, table, c.threads);
        if (js)
            out << "{\"x\":" << r.x << ",\"v_common\":" << r.v_common
                << ",\"lhs\":" << u128_to_string(r.lhs)
                << ",\"rhs\":" << u128_to_string(r.rhs)
                << ",\"sum_rr\":" << u128_to_string(r.sum_rr)
                << ",\"sum_r2r\":" << u128_to_string(r.sum_r2r)
                << ",\"sum_rr2\":" << u128_to_string(r.sum_rr2)
                << ",\"holds\":" << jbool(r.holds) << "}\n";
        else
            out << r.x << ',' << r.v_common << ',' << u128_to_string(r.lhs)
                << ',' << u128_to_string(r.rhs) << ',' << u128_to_string(r.sum_rr)
                << ',' << u128_to_string(r.sum_r2r) << ','
                << u128_to_string(r.sum_rr2) << ',' << jbool(r.holds) << '\n';
    }
}

// ---------------------------------------------------------------- constants

void run_constants(const RunConfig& c, std::ostream& out) {
    double tol = to_double(get_param(c, "tol", "1e-12"), "tol");
    FordConstants fc = ford_constants(tol);
    if (json_output(c, true)) {
        out << "{\"rho\":" << fmt_g15(fc.rho)
            << ",\"f_prime_rho\":" << fmt_g15(fc.F_prime_rho)
            << ",\"c\":" << fmt_g15(fc.C) << ",\"d\":" << fmt_g15(fc.D)
            << ",\"tolerance\":" << fmt_g15(fc.tolerance) << "}\n";
    } else {
        out << "rho,f_prime_rho,c,d,tolerance\n"
            << fmt_g15(fc.rho) << ',' << fmt_g15(fc.F_prime_rho) << ','
            << fmt_g15(fc.C) << ',' << fmt_g15(fc.D) << ','
            << fmt_g15(fc.tolerance) << '\n';
    }
}

// ---------------------------------------------------------------- series

FormSystem forms_from_config(const RunConfig& c) {
    FormSystem system;
    if (has_param(c, "forms_file")) {
        std::ifstream in(get_param(c, "forms_file", ""));
        if (!in)
            throw std::domain_error("cannot open forms file");
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw std::domain_error(std::string("bad forms file: ") + e.what());
        }
        if (!doc.is_array()) throw std::domain_error("forms file must be an array");
        for (const auto& item : doc) {
            AffineForm f;
            if (item.is_array() && item.size() == 2) {
                f.a = item[0].get<u64>();
                f.b = item[1].get<long long>();
            } else if (item.is_object()) {
                f.a = item.at("a").get<u64>();
                f.b = item.at("b").get<long long>();
            } else {
                throw std::domain_error("forms file entries must be [a,b] pairs");
            }
            system.forms.push_back(f);
        }
    } else {
        std::string text = get_param(c, "forms", "1*n+0,1*n+2");
        for (const auto& piece : split(text, ','))
            system.forms.push_back(parse_affine_form(piece));
    }
    validate_system(system);
    return system;
}

std::string form_to_string(const AffineForm& f) {
    std::string out = std::to_string(f.a) + "*n";
    if (f.b >= 0)
        out += "+" + std::to_string(f.b);
    else
        out += std::to_string(f.b);
    return out;
}

void run_series(const RunConfig& c, std::ostream& out) {
    FormSystem system = forms_from_config(c);
    u64 x = to_u64(get_param(c, "x", "100000"), "x");
    u64 prime_bound = to_u64(get_param(c, "prime_bound", "100000"), "prime bound");
    if (x < 2) throw std::domain_error("x must be at least 2");

    u64 needed = prime_bound;
    for (const auto& f : system.forms) {
        __int128 top = (__int128)f.a * x + f.b;
        if (top > (__int128)kPrimeTableCeiling)
            throw resource_error("form values exceed the sieve ceiling");
        if (top > 0) needed = std::max<u64>(needed, (u64)top);
    }
    PrimeTable table = make_table(c, needed);

    SingularSeries ss = singular_series(system, prime_bound, table);
    PredictionReport pr = prediction_ratio(system, x, prime_bound, table, c.threads);
    double bound = sieve_upper_bound(system, static_cast<double>(x));

    std::string forms_text;
    for (std::size_t i = 0; i < system.forms.size(); ++i) {
        if (i) forms_text += ',';
        forms_text += form_to_string(system.forms[i]);
    }

    if (json_output(c, false)) {
        out << "{\"forms\":\"" << jesc(forms_text) << "\",\"h\":" << system.h()
            << ",\"x\":" << x << ",\"prime_bound\":" << prime_bound
            << ",\"singular_series\":" << fmt_g15(ss.value)
            << ",\"last_factor_deviation\":" << fmt_g15(ss.last_factor_deviation)
            << ",\"observed\":" << pr.observed
            << ",\"predicted\":" << fmt_g15(pr.predicted)
            << ",\"ratio\":" << fmt_g15(pr.ratio)
            << ",\"sieve_upper_bound\":" << fmt_g15(bound) << "}\n";
    } else {
        out << "forms,h,x,prime_bound,singular_series,last_factor_deviation,"
               "observed,predicted,ratio,sieve_upper_bound\n";
        out << '"' << forms_text << "\"," << system.h() << ',' << x << ','
            << prime_bound << ',' << fmt_g15(ss.value) << ','
            << fmt_g15(ss.last_factor_deviation) << ',' << pr.observed << ','
            << fmt_g15(pr.predicted) << ',' << fmt_g15(pr.ratio) << ','
            << fmt_g15(bound) << '\n';
    }
}

// ---------------------------------------------------------------- membership

std::vector<u64> default_relaxed_levels(double alpha, u64 x, unsigned k) {
    std::vector<u64> v = derived_ladder(alpha, x, k);
    // Repair bottom-up: deepest level at least 6, strictly decreasing above.
    if (v[k] < 6) v[k] = 6;
    for (unsigned i = k; i-- > 1;)
        if (v[i] <= v[i + 1]) v[i] = v[i + 1] + 1;
    if (k >= 1 && v[0] <= v[1])
        throw std::domain_error("x too small to fit " + std::to_string(k) +
                                " relaxed levels");
    return v;
}

StructureParams params_from_config(const RunConfig& c) {
    StructureParams p;
    p.alpha = to_double(get_param(c, "alpha", "0.54"), "alpha");
    p.k = static_cast<unsigned>(to_u64(get_param(c, "k", "2"), "k"));
    p.x = to_u64(get_param(c, "x", "1000000"), "x");
    std::string mode = get_param(c, "mode", "strict");
    if (mode == "strict") {
        p.mode = LevelMode::strict;
        if (has_param(c, "levels"))
            throw std::domain_error("explicit levels apply to relaxed mode only");
    } else if (mode == "relaxed") {
        p.mode = LevelMode::relaxed;
        if (has_param(c, "levels"))
            p.relaxed_levels = to_u64_list(get_param(c, "levels", ""), "levels");
        else
            p.relaxed_levels = default_relaxed_levels(p.alpha, p.x, p.k);
    } else {
        throw std::domain_error("mode must be strict or relaxed");
    }
    validate_params(p);
    return p;
}

const char* status_str(ConditionStatus s) {
    switch (s) {
        case ConditionStatus::pass: return "pass";
        case ConditionStatus::fail: return "fail";
        default: return "na";
    }
}

void run_membership(const RunConfig& c, std::ostream& out) {
    StructureParams params = params_from_config(c);
    std::string function = get_param(c, "function", "phi");
    if (function != "phi" && function != "sigma")
        throw std::domain_error("function must be phi or sigma");
    u64 from = to_u64(get_param(c, "from", "2"), "from");
    u64 to = to_u64(get_param(c, "to", get_param(c, "from", "200")), "to");
    if (from < 2) throw std::domain_error("from must be at least 2");
    if (to < from) throw std::domain_error("to must be >= from");

    u64 needed = function == "phi" ? to + 2 : checked_add(checked_mul(to, 4), 64);
    PrimeTable table = make_table(c, needed);

    static const char* kNames[5] = {"size_bound", "prime_bracketing",
                                    "prime_counts", "smooth_part",
                                    "unit_multiplicity"};
    bool js = json_output(c, true);
    if (!js)
        out << "n,member,size_bound,prime_bracketing,prime_counts,smooth_part,"
               "unit_multiplicity\n";
    for (u64 n = from; n <= to; ++n) {
        MembershipReport rep = function == "phi"
                                   ? phi_membership(n, params, table)
                                   : sigma_membership(n, params, table);
        if (js) {
            out << "{\"n\":" << rep.n << ",\"member\":" << jbool(rep.member)
                << ",\"conditions\":[";
            for (int i = 0; i < 5; ++i) {
                if (i) out << ',';
                out << "{\"name\":\"" << kNames[i] << "\",\"status\":\""
                    << status_str(rep.conditions[i].status) << "\",\"reason\":\""
                    << jesc(rep.conditions[i].reason) << "\"}";
            }
            out << "]}\n";
        } else {
            out << rep.n << ',' << jbool(rep.member);
            for (int i = 0; i < 5; ++i)
                out << ',' << status_str(rep.conditions[i].status);
            out << '\n';
        }
    }
}

// ---------------------------------------------------------------- construct

void run_construct(const RunConfig& c, std::ostream& out) {
    StructureParams params = params_from_config(c);
    SearchBudget budget;
    budget.max_t_candidates = to_u64(get_param(c, "max_t", "256"), "max-t");
    budget.max_q_candidates = to_u64(get_param(c, "max_q", "4096"), "max-q");
    budget.max_outputs = to_u64(get_param(c, "max_outputs", "1024"), "max-outputs");
    for (unsigned level = 1; level <= 8; ++level) {
        std::string key = "q" + std::to_string(level);
        if (has_param(c, key))
            budget.q_window_override[level] =
                to_window(get_param(c, key, ""), key + "-window");
    }

    // Candidate primes reach s_1 t' Q + 1 <= x + 1; pad the sieve a little.
    PrimeTable table = make_table(c, checked_add(std::max<u64>(params.x, 1000), 64));
    ConstructResult res = construct_solutions(params, budget, table);

    for (const auto& d : res.diagnostics) std::cerr << "note: " << d << "\n";

    bool js = json_output(c, true);
    if (!js)
        out << "n,m,value,phi_n,sigma_m,n_primes,m_primes\n";
    for (const auto& sol : res.solutions) {
        if (js) {
            out << "{\"n\":" << sol.n << ",\"m\":" << sol.m
                << ",\"value\":" << sol.value << ",\"phi_n\":" << sol.value
                << ",\"sigma_m\":" << sol.value
                << ",\"n_primes\":" << jarr(sol.n_primes)
                << ",\"m_primes\":" << jarr(sol.m_primes) << ",\"trace\":[";
            for (std::size_t i = 0; i < sol.trace.size(); ++i) {
                const auto& st = sol.trace[i];
                if (i) out << ',';
                out << "{\"level\":" << st.level << ",\"t\":" << st.t
                    << ",\"q\":" << st.q
                    << ",\"phi_parts\":" << jarr(st.phi_parts)
                    << ",\"sigma_parts\":" << jarr(st.sigma_parts) << '}';
            }
            out << "]}\n";
        } else {
            out << sol.n << ',' << sol.m << ',' << sol.value << ',' << sol.value
                << ',' << sol.value << ',' << join_semicolon(sol.n_primes) << ','
                << join_semicolon(sol.m_primes) << '\n';
        }
    }
}

// ---------------------------------------------------------------- lemmas

FactoredInteger primorial(unsigned omega) {
    static const u64 kPrimes[6] = {2, 3, 5, 7, 11, 13};
    FactoredInteger f;
    for (unsigned i = 0; i < omega; ++i) {
        f.value = checked_mul(f.value, kPrimes[i]);
        f.factors.emplace_back(kPrimes[i], 1);
    }
    return f;
}

void run_lemmas(const RunConfig& c, std::ostream& out) {
    struct Row {
        const char* lemma;
        std::string label;
        bool holds;
    };
    std::vector<Row> rows;

    for (unsigned omega = 1; omega <= 6; ++omega) {
        FactoredInteger n = primorial(omega);
        for (unsigned i : {1u, 2u, 3u}) {
            for (double delta : {0.5, 1.0, 1.3, 2.0}) {
                DeviationReport r = factorization_deviation(n, i, delta);
                rows.push_back({"factorization_deviation",
                                "omega=" + std::to_string(omega) +
                                    " i=" + std::to_string(i) +
                                    " delta=" + fmt_g15(delta),
                                r.holds});
            }
        }
    }
    for (double z : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        for (double delta : {0.25, 0.5, 1.0, 2.0, 100.0}) {
            PoissonChebyshevReport r = poisson_tail_chebyshev(z, delta);
            rows.push_back({"poisson_tail_chebyshev",
                            "z=" + fmt_g15(z) + " delta=" + fmt_g15(delta),
                            r.holds});
        }
        for (auto [alpha, beta] :
             {std::pair{0.25, 4.0}, std::pair{0.5, 2.0}, std::pair{0.9, 1.1}}) {
            PoissonExponentialReport r = poisson_tail_exponential(z, alpha, beta);
            rows.push_back({"poisson_tail_exponential",
                            "z=" + fmt_g15(z) + " alpha=" + fmt_g15(alpha) +
                                " beta=" + fmt_g15(beta),
                            r.holds});
        }
    }
    for (unsigned omega : {0u, 1u, 3u, 4u}) {
        FactoredInteger t = primorial(omega);
        for (unsigned i : {2u, 3u}) {
            u64 count = dual_factorization_count(t, i, std::nullopt);
            bool ok = count == checked_pow(i, 2 * omega);
            rows.push_back({"dual_factorization_count",
                            "t=" + std::to_string(t.value) +
                                " i=" + std::to_string(i) + " unfiltered",
                            ok});
        }
    }
    for (double alpha : {0.51, 0.54, 0.60}) {
        for (unsigned k = 1; k <= 10; ++k) {
            bool all = true;
            for (u64 mask = 0; mask < (u64(1) << k); ++mask) {
                std::vector<unsigned> matched;
                for (unsigned b = 0; b < k; ++b)
                    if (mask & (u64(1) << b)) matched.push_back(b);
                if (!index_inequality_check(alpha, k, matched).holds) all = false;
            }
            rows.push_back({"index_inequality",
                            "alpha=" + fmt_g15(alpha) + " k=" + std::to_string(k) +
                                " all subsets",
                            all});
        }
    }

    bool js = json_output(c, false);
    if (!js) out << "lemma,case,holds\n";
    for (const auto& row : rows) {
        if (js)
            out << "{\"lemma\":\"" << row.lemma << "\",\"case\":\""
                << jesc(row.label) << "\",\"holds\":" << jbool(row.holds)
                << "}\n";
        else
            out << row.lemma << ",\"" << row.label << "\"," << jbool(row.holds)
                << '\n';
    }
}

// ---------------------------------------------------------------- twins

void run_twins(const RunConfig& c, std::ostream& out) {
    u64 x = to_u64(get_param(c, "x", "1000"), "x");
    if (x < 2) throw std::domain_error("x must be at least 2");
    PrimeTable table = make_table(c, checked_add(x, 2));
    auto rows = twin_prime_common_values(x, table);
    bool js = json_output(c, false);
    if (!js) out << "p,value\n";
    for (auto [p, value] : rows) {
        if (js)
            out << "{\"p\":" << p << ",\"value\":" << value << "}\n";
        else
            out << p << ',' << value << '\n';
    }
}

} // namespace

int run(const RunConfig& config) {
    std::ofstream file;
    std::ostream* out = &std::cout;
    try {
        if (!config.output_path.empty()) {
            file.open(config.output_path, std::ios::binary);
            if (!file)
                throw std::domain_error("cannot open output file: " +
                                        config.output_path);
            out = &file;
        }
        if (config.subcommand == "values")
            run_values(config, *out);
        else if (config.subcommand == "holder")
            run_holder(config, *out);
        else if (config.subcommand == "constants")
            run_constants(config, *out);
        else if (config.subcommand == "series")
            run_series(config, *out);
        else if (config.subcommand == "membership")
            run_membership(config, *out);
        else if (config.subcommand == "construct")
            run_construct(config, *out);
        else if (config.subcommand == "lemmas")
            run_lemmas(config, *out);
        else if (config.subcommand == "twins")
            run_twins(config, *out);
        else
            throw std::domain_error("unknown subcommand: " + config.subcommand);
        out->flush();
        return kExitOk;
    } catch (const internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::overflow_error& e) {
        std::cerr << "overflow: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::bad_alloc&) {
        std::cerr << "resource error: out of memory\n";
        return kExitResource;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace phisig
