/// Command-line front end: point counts, M_E(N), class numbers, Deuring tables,
/// constants, family averages, BDH statistics and the full experiment report.
///
/// Exit codes: 0 success, 2 usage error, 3 precondition error, 1 I/O failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "curve_spectrum/curve_spectrum.hpp"

namespace cs = curve_spectrum;
using cs::arith::i64;
using cs::arith::u64;
using json = nlohmann::ordered_json;

namespace {

enum class output_format { text, csv, json };

struct table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    json as_json;
    std::string raw_csv;  ///< preformatted CSV that replaces header/rows when set
};

std::string render(const table& t, output_format fmt) {
    std::ostringstream os;
    switch (fmt) {
        case output_format::json: os << t.as_json.dump() << '\n'; break;
        case output_format::csv:
            if (!t.raw_csv.empty()) {
                os << t.raw_csv;
                break;
            }
            cs::expt::write_csv_row(os, t.header);
            for (const auto& r : t.rows) cs::expt::write_csv_row(os, r);
            break;
        case output_format::text:
            if (t.header.size() == 1 && t.rows.size() == 1) {
                os << t.rows[0][0] << '\n';
                break;
            }
            for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? " " : "") << t.header[i];
            os << '\n';
            for (const auto& r : t.rows) {
                for (std::size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << r[i];
                os << '\n';
            }
            break;
    }
    return os.str();
}

std::filesystem::path cache_path() {
    if (const char* env = std::getenv("CURVE_SPECTRUM_CACHE")) return env;
    if (const char* home = std::getenv("HOME")) return std::filesystem::path(home) / ".cache" / "curve_spectrum" / "classno.csv";
    return {};
}

std::string real(double v) { return cs::expt::format_real(v); }

std::vector<i64> parse_list(const std::string& s) {
    std::vector<i64> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const long long v = std::stoll(item, &used);
        if (used != item.size()) throw CLI::ValidationError("--N", "not an integer: " + item);
        out.push_back(v);
    }
    return out;
}

table report_table(const cs::expt::experiment_report& rep) {
    table t;
    std::ostringstream os;
    cs::expt::write_csv(os, rep);
    t.raw_csv = os.str();
    t.as_json = cs::expt::to_json(rep);
    t.header = {"N", "family_average", "class_side", "predicted", "relative_gap"};
    for (const auto& r : rep.rows) {
        t.rows.push_back({std::to_string(r.N), r.family_average.str(), real(r.class_side), real(r.predicted),
                          real(r.relative_gap)});
    }
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elliptic-curve prime counts, class numbers and the predicted average constant"};
    app.fallthrough();
    app.require_subcommand(1);
    std::string format = "text";
    std::string out_path;
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
    app.add_option("--out", out_path, "Write output to FILE instead of stdout");

    i64 a = 0, b = 0, D = 0, N = 0;
    u64 p = 0, U = 10'000, V = 200, L = 10'000;
    i64 box_A = 500, box_B = 500;
    std::string n_list;
    double X = 0, Y = 0;
    u64 Q = 0;
    bool exclude_p3 = false;
    unsigned threads = 0;

    auto* count = app.add_subcommand("count", "Point count #E(F_p) of y^2 = x^3 + ax + b");
    count->add_option("a", a)->required();
    count->add_option("b", b)->required();
    count->add_option("p", p)->required();

    auto* me = app.add_subcommand("me", "M_E(N), the number of good primes with exactly N points");
    me->add_option("a", a)->required();
    me->add_option("b", b)->required();
    me->add_option("N", N)->required();

    auto* hclass = app.add_subcommand("hclass", "Kronecker class number H(D)");
    hclass->add_option("D", D)->required();

    auto* deuring = app.add_subcommand("deuring", "Deuring mass against H(t^2 - 4p) for every trace");
    deuring->add_option("p", p)->required();

    auto* constant = app.add_subcommand("constant", "K(N), the truncated K_0(N) and their identity residual");
    constant->add_option("N", N)->required();
    constant->add_option("--U", U, "n cutoff")->capture_default_str();
    constant->add_option("--V", V, "f cutoff")->capture_default_str();
    constant->add_option("--L", L, "Euler product cutoff")->capture_default_str();

    auto add_box = [&](CLI::App* sub) {
        sub->add_option_function<std::vector<i64>>(
               "--box",
               [&](const std::vector<i64>& v) {
                   box_A = v.at(0);
                   box_B = v.at(1);
               },
               "Coefficient bounds A B")
            ->expected(2);
        sub->add_flag("--exclude-p3", exclude_p3, "Do not count p = 3");
        sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    };

    auto* average = app.add_subcommand("average", "Exact family average of M_E(N) over |a| <= A, |b| <= B");
    add_box(average);
    average->get_option("--box")->required();
    average->add_option("--N", n_list, "Comma-separated N values")->required();

    auto* bdh = app.add_subcommand("bdh", "Sum over q <= Q and (a, q) = 1 of E(X, Y; q, a)^2");
    bdh->add_option("--X", X)->required();
    bdh->add_option("--Y", Y)->required();
    bdh->add_option("--Q", Q)->required();

    auto* report = app.add_subcommand("report", "Family average, class-number side and predicted main term per N");
    add_box(report);
    n_list = "9,15,21,27,45";
    report->add_option("--N", n_list, "Comma-separated odd N values")->capture_default_str();
    report->add_option("--U", U)->capture_default_str();
    report->add_option("--V", V)->capture_default_str();
    report->add_option("--L", L)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const output_format fmt = format == "json" ? output_format::json
                              : format == "csv" ? output_format::csv
                                                : output_format::text;

    auto& cache = cs::classno::default_cache();
    const std::filesystem::path cache_file = cache_path();
    std::string output;
    try {
        if (!cache_file.empty()) {
            try {
                cache.load(cache_file);
            } catch (const cs::error& e) {
                std::cerr << "warning: ignoring class-number cache: " << e.what() << '\n';
            }
        }

        table t;
        if (*count) {
            const i64 n = cs::curves::count_points({a, b}, p, {.allow_p3 = true});
            t.header = {"count"};
            t.rows = {{std::to_string(n)}};
            t.as_json = {{"a", a}, {"b", b}, {"p", p}, {"count", n}};
        } else if (*me) {
            if (N < 1) throw cs::error(cs::error_kind::precondition, "N must be positive");
            const u64 m = cs::curves::m_e({a, b}, u64(N));
            t.header = {"M_E"};
            t.rows = {{std::to_string(m)}};
            t.as_json = {{"a", a}, {"b", b}, {"N", N}, {"M_E", m}};
        } else if (*hclass) {
            const auto H = cs::classno::kronecker_class_number(D, cache);
            t.header = {"H"};
            t.rows = {{H.value.str()}};
            t.as_json = {{"D", D}, {"H", H.value.str()}};
        } else if (*deuring) {
            t.header = {"t", "mass", "H", "match"};
            t.as_json = json::array();
            for (const auto& r : cs::classno::deuring_table(p, cache)) {
                t.rows.push_back({std::to_string(r.t), r.mass.str(), r.h.str(), r.match() ? "true" : "false"});
                t.as_json.push_back({{"t", r.t}, {"mass", r.mass.str()}, {"H", r.h.str()}, {"match", r.match()}});
            }
        } else if (*constant) {
            const cs::constants::truncation_spec spec{U, V, L};
            const auto K = cs::constants::k_of_n(N, spec);
            const auto id = cs::constants::identity_check(N, spec);
            t.header = {"N", "K", "K_envelope", "K0", "rhs", "residual", "envelope"};
            t.rows = {{std::to_string(N), real(K.value), real(K.envelope), real(id.k0), real(id.rhs), real(id.residual),
                       real(id.envelope)}};
            t.as_json = {{"N", N},           {"U", U},
                         {"V", V},           {"L", L},
                         {"K", K.value},     {"K_envelope", K.envelope},
                         {"K0", id.k0},      {"rhs", id.rhs},
                         {"residual", id.residual}, {"envelope", id.envelope}};
        } else if (*average) {
            const cs::curves::family_box box{box_A, box_B};
            t.header = {"N", "A", "B", "family_average", "decimal"};
            t.as_json = json::array();
            for (i64 n : parse_list(n_list)) {
                if (n < 3) throw cs::error(cs::error_kind::precondition, "family_average requires N >= 3");
                const auto avg = cs::curves::family_average(u64(n), box, {!exclude_p3, threads});
                t.rows.push_back({std::to_string(n), std::to_string(box_A), std::to_string(box_B), avg.str(),
                                  real(avg.to_double())});
                t.as_json.push_back({{"N", n}, {"A", box_A}, {"B", box_B}, {"family_average", avg.str()},
                                     {"decimal", avg.to_double()}});
            }
        } else if (*bdh) {
            const double s = cs::expt::bdh_statistic(X, Y, Q);
            const double ratio = s / (Y * double(Q) * std::log(X));
            t.header = {"X", "Y", "Q", "statistic", "ratio"};
            t.rows = {{real(X), real(Y), std::to_string(Q), real(s), real(ratio)}};
            t.as_json = {{"X", X}, {"Y", Y}, {"Q", Q}, {"statistic", s}, {"ratio", ratio}};
        } else if (*report) {
            const auto rep = cs::expt::run_experiment(parse_list(n_list), {box_A, box_B}, {U, V, L},
                                                      {.include_p3 = !exclude_p3, .threads = threads});
            t = report_table(rep);
        }
        output = render(t, fmt);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::logic_error&) {
        std::cerr << "error: malformed number in list\n";
        return 2;
    } catch (const cs::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == cs::error_kind::io ? 1 : 3;
    }

    if (!cache_file.empty() && cache.dirty()) {
        try {
            cache.save(cache_file);
        } catch (const std::exception& e) {
            std::cerr << "warning: could not save class-number cache: " << e.what() << '\n';
        }
    }

    if (out_path.empty()) {
        std::cout << output;
        return std::cout ? 0 : 1;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << output;
    if (!out) {
        std::cerr << "error: cannot write " << out_path << '\n';
        return 1;
    }
    return 0;
}
