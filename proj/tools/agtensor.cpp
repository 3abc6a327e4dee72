// Command-line front end: family verification, decoding, robustness sweeps,
// curve search, precondition reports and small tensor-code property checks.
//
// Exit codes: 0 = success, 1 = a verification or decode check failed,
// 2 = usage or input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <agtensor/ag_families.hpp>
#include <agtensor/constants.hpp>
#include <agtensor/decoder.hpp>
#include <agtensor/experiment.hpp>
#include <agtensor/serialize.hpp>
#include <agtensor/tensor.hpp>

namespace {

using namespace agtensor;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct FamilyFlags {
    std::string kind = "rs";
    std::uint64_t modulus = 0;
    std::int64_t points = 0;
    std::uint32_t curve_a = 0;
    std::uint32_t curve_b = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--kind", kind, "Family kind")
            ->check(CLI::IsMember({"rs", "elliptic"}))
            ->capture_default_str();
        cmd->add_option("--modulus", modulus, "Prime field modulus")->required();
        cmd->add_option("--points", points, "Evaluation point count (0 = all)")
            ->capture_default_str();
        cmd->add_option("--curve-a", curve_a, "Curve coefficient a (elliptic)")
            ->capture_default_str();
        cmd->add_option("--curve-b", curve_b, "Curve coefficient b (elliptic)")
            ->capture_default_str();
    }

    FamilySpec spec() const { return FamilySpec{kind, modulus, points, curve_a, curve_b}; }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Grid read_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_grid(in);
}

void write_text_file(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

std::vector<std::int64_t> parse_int_list(const std::string& csv) {
    std::vector<std::int64_t> out;
    std::istringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (!t.empty()) out.push_back(std::stoll(t));
    }
    return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> parse_pair_list(const std::string& csv) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    std::istringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (t.empty()) continue;
        std::size_t colon = t.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("pair list entries must look like l:m, got '" + t + "'");
        out.emplace_back(std::stoll(t.substr(0, colon)), std::stoll(t.substr(colon + 1)));
    }
    return out;
}

std::vector<std::int64_t> default_degree_samples(std::int64_t n) {
    std::vector<std::int64_t> cand = {0, 1, 2, 3, n / 8, n / 4, n / 2, 3 * n / 4, n - 1, n};
    std::vector<std::int64_t> out;
    for (std::int64_t d : cand) {
        if (d < 0 || d > n) continue;
        bool seen = false;
        for (std::int64_t e : out) seen |= (e == d);
        if (!seen) out.push_back(d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> default_pair_samples(
    const std::vector<std::int64_t>& degrees, std::int64_t n) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (std::size_t i = 0; i < degrees.size() && out.size() < 8; ++i) {
        if (degrees[i] == 0) continue;
        if (2 * degrees[i] <= n) out.emplace_back(degrees[i], degrees[i]);
        if (i + 1 < degrees.size() && degrees[i] + degrees[i + 1] <= n && out.size() < 8)
            out.emplace_back(degrees[i], degrees[i + 1]);
    }
    return out;
}

int run_verify_family(const FamilyFlags& fam, const std::string& degrees_csv,
                      const std::string& pairs_csv, const std::string& distance_mode,
                      std::uint64_t budget, int spot_checks, std::uint64_t seed,
                      std::int64_t mutate_degree) {
    AGFamily family = fam.spec().build();
    if (mutate_degree >= 0) {
        // Test hook: plant a corrupted generator at one degree so the
        // verifier's failure path can be demonstrated end to end.
        Matrix gen = family.member(mutate_degree).generator();
        gen.set(0, 0, family.field().add(gen.get(0, 0), 1));
        family = family.with_member_override(mutate_degree, gen);
        std::cout << "note: generator at degree " << mutate_degree << " deliberately corrupted\n";
    }
    const std::int64_t n = family.length();
    std::vector<std::int64_t> degrees =
        degrees_csv.empty() ? default_degree_samples(n) : parse_int_list(degrees_csv);
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs =
        pairs_csv.empty() ? default_pair_samples(degrees, n) : parse_pair_list(pairs_csv);
    DistanceCheckMode mode = distance_mode == "exact" ? DistanceCheckMode::Exact
                                                      : DistanceCheckMode::Certificate;
    FamilyVerification report =
        verify_family(family, degrees, pairs, mode, budget, seed, spot_checks);

    std::cout << "family: kind=" << fam.kind << " q=" << fam.modulus << " n=" << n
              << " genus=" << family.genus() << "\n";
    std::cout << "degree  dim  slack  distance(" << distance_mode << ")  ok\n";
    for (const DegreeCheck& c : report.degree_checks)
        std::cout << c.degree << "  " << c.dimension << "  " << c.dimension_slack << "  "
                  << c.distance_value << " [" << c.distance_method << "]  "
                  << ((c.dimension_ok && c.distance_ok) ? "yes" : "NO") << "\n";
    for (const StarCheck& c : report.star_checks)
        std::cout << "products " << c.degree_left << "*" << c.degree_right << ": "
                  << c.products_tested << " tested, " << c.violations.size()
                  << " outside the sum degree\n";
    std::cout << (report.ok() ? "family checks passed" : "family checks FAILED") << " ("
              << report.violation_count << " violations)\n";
    return report.ok() ? kExitOk : kExitCheckFailed;
}

int run_decode(const FamilyFlags& fam, const std::string& rows_path,
               const std::string& cols_path, std::int64_t degree,
               const std::string& config_path, std::int64_t trial, const std::string& mode_str,
               std::uint64_t seed, const std::string& trace_path) {
    DecodeMode mode = decode_mode_from_string(mode_str);
    DecoderTrace trace;
    DecodeResult result = [&] {
        if (!config_path.empty()) {
            ExperimentConfig cfg = ExperimentConfig::parse(read_file(config_path));
            if (cfg.model != "planted-lines")
                throw std::runtime_error("decode --config requires the planted-lines model");
            AGFamily family = cfg.family.build();
            std::uint64_t trial_seed = derive_seed(cfg.seed, std::uint64_t(trial));
            PlantedInstance inst = make_planted(family, cfg.degree, cfg.planted_rows,
                                                cfg.planted_cols, trial_seed);
            return decode(family, cfg.degree, inst.rows_word, inst.cols_word,
                          decode_mode_from_string(cfg.mode), derive_seed(trial_seed, 1),
                          &trace);
        }
        if (rows_path.empty() || cols_path.empty())
            throw std::runtime_error("decode needs --rows and --cols files or --config");
        AGFamily family = fam.spec().build();
        Grid rows_word = read_grid_file(rows_path);
        Grid cols_word = read_grid_file(cols_path);
        return decode(family, degree, rows_word, cols_word, mode, seed, &trace);
    }();

    if (!trace_path.empty()) write_text_file(trace_path, trace.to_string());
    std::cout << "disagreements: " << result.disagreements << " (epsilon = "
              << result.epsilon.str() << " ~ " << result.epsilon.decimal_str(6) << ")\n";
    std::cout << "preconditions: " << (result.preconditions.ok() ? "ok" : "FAILED") << "\n";
    std::cout << "completed: " << (result.completed ? "yes" : "no")
              << "  certified: " << (result.certified ? "yes" : "no") << "\n";
    if (result.completed) {
        std::cout << "dist to row word: " << result.accounting.dist_rows()
                  << "  dist to column word: " << result.accounting.dist_cols() << "\n";
        std::cout << "delta sum " << (result.delta_rows + result.delta_cols).str()
                  << (result.bound_holds ? " <= " : " > ") << "2*epsilon = "
                  << (Rational(2) * result.epsilon).str() << "\n";
    } else {
        std::cout << "failure: " << result.failure_reason << "\n";
    }
    return (result.completed && result.bound_holds) ? kExitOk : kExitCheckFailed;
}

int run_sweep(const std::string& config_path, const std::string& decode_csv_path,
              const std::string& robust_csv_path, bool print_config) {
    ExperimentConfig cfg = ExperimentConfig::parse(read_file(config_path));
    if (print_config) {
        std::cout << cfg.serialize();
        std::cout << "# digest = " << cfg.digest() << "\n";
        return kExitOk;
    }
    std::ofstream decode_csv, robust_csv;
    std::ostream* dout = nullptr;
    std::ostream* rout = nullptr;
    if (!decode_csv_path.empty()) {
        decode_csv.open(decode_csv_path, std::ios::binary);
        if (!decode_csv) throw std::runtime_error("cannot open " + decode_csv_path);
        dout = &decode_csv;
    }
    if (!robust_csv_path.empty()) {
        robust_csv.open(robust_csv_path, std::ios::binary);
        if (!robust_csv) throw std::runtime_error("cannot open " + robust_csv_path);
        rout = &robust_csv;
    }
    SweepOutcome outcome = run_sweep(cfg, dout, rout);
    std::cout << "config digest: " << cfg.digest() << "\n";
    std::cout << "decode trials: " << outcome.decode_records.size()
              << "  robust trials: " << outcome.robust_records.size()
              << "  failures: " << outcome.failures << "\n";
    for (const DecodeTrialRecord& r : outcome.decode_records)
        std::cout << "  trial " << r.trial << ": eps=" << r.epsilon.str() << " deltas=("
                  << r.dist_rows << "," << r.dist_cols << ") bound_holds="
                  << (r.bound_holds ? "yes" : "NO") << " [" << r.millis << " ms]\n";
    for (const RobustTrialRecord& r : outcome.robust_records) {
        std::cout << "  trial " << r.trial << " (robust/" << r.branch
                  << "): bound=" << r.tensor_bound.str() << " lhs=" << r.lhs.str()
                  << " rhs=" << r.rhs.str() << " pass=" << (r.pass ? "yes" : "NO") << " ["
                  << r.millis << " ms]\n";
        if (!r.note.empty()) std::cout << "    note: " << r.note << "\n";
    }
    return outcome.failures == 0 ? kExitOk : kExitCheckFailed;
}

int run_find_curve(std::uint64_t modulus, std::int64_t min_points) {
    PrimeField field(modulus);
    std::optional<std::pair<std::uint32_t, std::uint32_t>> found =
        find_curve(field, min_points);
    if (!found) {
        std::cout << "no nonsingular curve over GF(" << modulus << ") reaches " << min_points
                  << " affine points\n";
        return kExitCheckFailed;
    }
    EllipticCurve curve(field, found->first, found->second);
    std::cout << "curve: y^2 = x^3 + " << found->first << "*x + " << found->second
              << " over GF(" << modulus << ")\n";
    std::cout << "affine points: " << curve.affine_count()
              << " (rational: " << curve.rational_count() << ")\n";
    return kExitOk;
}

int run_check_constants(std::int64_t length, std::int64_t degree, std::int64_t genus,
                        std::uint64_t modulus, const std::string& epsilon_str) {
    if (length <= 0) {
        std::cout << "epsilon upper bound: " << kEpsilonMax.str() << "\n";
        std::cout << "degree floor:        " << kMinDegree << "\n";
        std::cout << "length scale:        " << kScaleConstant << " * (degree + genus)^2\n";
        std::cout << "robustness bound:    " << kRobustnessBound.str() << "\n";
        return kExitOk;
    }
    Rational eps = Rational::parse(epsilon_str);
    PreconditionReport report = check_preconditions(length, degree, genus, modulus, eps);
    DecoderConstants k = DecoderConstants::derive(eps, degree, genus);
    std::cout << "window = " << k.window << "  localizer_degree = " << k.localizer_degree
              << "  window_error_cap = " << k.window_error_cap() << "\n";
    for (const PreconditionCheck& c : report.checks)
        std::cout << (c.pass ? "  [ok]   " : "  [FAIL] ") << c.name << ": " << c.detail
                  << "\n";
    std::cout << (report.ok() ? "preconditions hold" : "preconditions FAILED") << "\n";
    return report.ok() ? kExitOk : kExitCheckFailed;
}

int run_tensor_props(const FamilyFlags& fam, std::int64_t row_degree, std::int64_t col_degree,
                     std::int64_t subset_cols, std::int64_t subset_rows, int checks,
                     std::uint64_t seed) {
    AGFamily family = fam.spec().build();
    const std::int64_t n = family.length();
    const PrimeField& f = family.field();
    TensorCode code(family.member(row_degree), family.member(col_degree));
    if (subset_cols <= row_degree || subset_rows <= col_degree)
        throw std::runtime_error(
            "subset sizes must exceed the degrees for restriction to be faithful");
    if (subset_cols > n || subset_rows > n)
        throw std::runtime_error("subset sizes cannot exceed the family length");
    Rng rng(seed);
    int failures = 0;
    for (int t = 0; t < checks; ++t) {
        Matrix coeffs(f, code.col_code.dimension(), code.row_code.dimension());
        for (std::size_t j = 0; j < coeffs.rows(); ++j)
            for (std::size_t i = 0; i < coeffs.cols(); ++i)
                coeffs.set(j, i, std::uint32_t(rng.below(f.modulus())));
        Grid grid = expand(code, CoefficientForm{coeffs});
        bool member = tensor_contains(code, grid);

        CoordinateSet a(n, rng.sample_distinct(n, subset_cols));
        CoordinateSet b(n, rng.sample_distinct(n, subset_rows));
        bool commutes = restriction_commutes_with_tensor(code, a, b);

        Grid values(f, std::int64_t(a.size()), std::int64_t(b.size()));
        for (std::size_t yy = 0; yy < b.size(); ++yy)
            for (std::size_t xx = 0; xx < a.size(); ++xx)
                values.set(std::int64_t(xx), std::int64_t(yy), grid.get(a.at(xx), b.at(yy)));
        TensorExtension ext = extend_from_restriction(code, a, b, values);
        bool recovered = (ext.grid == grid);

        if (!member || !commutes || !recovered) ++failures;
        std::cout << "check " << t << ": member=" << (member ? "yes" : "NO")
                  << " restriction-commutes=" << (commutes ? "yes" : "NO")
                  << " extension-recovers=" << (recovered ? "yes" : "NO") << "\n";
    }
    std::cout << (failures == 0 ? "tensor properties hold" : "tensor properties FAILED")
              << " (" << failures << " failing checks)\n";
    return failures == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tensor-code toolkit: graded evaluation families, pair decoding and "
                 "robust testing"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads,
                   "Worker threads (reserved; the current implementation is single-threaded)");

    // verify-family
    auto* vf = app.add_subcommand("verify-family",
                                  "Check dimension, distance and product-degree properties");
    FamilyFlags vf_fam;
    vf_fam.attach(vf);
    std::string vf_degrees, vf_pairs, vf_distance_mode = "certificate";
    std::uint64_t vf_budget = (1ull << 22), vf_seed = 1;
    int vf_spot_checks = 32;
    std::int64_t vf_mutate = -1;
    vf->add_option("--degrees", vf_degrees, "Comma-separated degrees (default: spread sample)");
    vf->add_option("--pairs", vf_pairs, "Comma-separated l:m product pairs");
    vf->add_option("--distance-mode", vf_distance_mode, "Distance check mode")
        ->check(CLI::IsMember({"exact", "certificate"}))
        ->capture_default_str();
    vf->add_option("--budget", vf_budget, "Search budget for exact distance checks")
        ->capture_default_str();
    vf->add_option("--spot-checks", vf_spot_checks, "Random codeword weight spot checks")
        ->capture_default_str();
    vf->add_option("--seed", vf_seed, "Spot check seed")->capture_default_str();
    vf->add_option("--mutate", vf_mutate,
                   "Deliberately corrupt the generator at this degree (failure-path demo)");

    // decode
    auto* dc = app.add_subcommand("decode", "Decode a row-word/column-word pair");
    FamilyFlags dc_fam;
    std::string dc_rows, dc_cols, dc_config, dc_mode = "certified", dc_trace;
    std::int64_t dc_degree = 0, dc_trial = 0;
    std::uint64_t dc_seed = 1;
    dc->add_option("--kind", dc_fam.kind, "Family kind")
        ->check(CLI::IsMember({"rs", "elliptic"}))
        ->capture_default_str();
    dc->add_option("--modulus", dc_fam.modulus, "Prime field modulus");
    dc->add_option("--points", dc_fam.points, "Evaluation point count (0 = all)");
    dc->add_option("--curve-a", dc_fam.curve_a, "Curve coefficient a (elliptic)");
    dc->add_option("--curve-b", dc_fam.curve_b, "Curve coefficient b (elliptic)");
    dc->add_option("--rows", dc_rows, "Row word grid file");
    dc->add_option("--cols", dc_cols, "Column word grid file");
    dc->add_option("--degree", dc_degree, "Member degree for the line codes");
    dc->add_option("--config", dc_config, "Experiment config (planted-lines instance)");
    dc->add_option("--trial", dc_trial, "Trial index when using --config")
        ->capture_default_str();
    dc->add_option("--mode", dc_mode, "certified or best-effort")
        ->check(CLI::IsMember({"certified", "best-effort"}))
        ->capture_default_str();
    dc->add_option("--seed", dc_seed, "Window search seed (file mode)")->capture_default_str();
    dc->add_option("--trace", dc_trace, "Write the decode trace JSON here ('-' = stdout)");

    // sweep
    auto* sw = app.add_subcommand("sweep", "Run configured decode/robustness trials");
    std::string sw_config, sw_decode_csv, sw_robust_csv;
    bool sw_print = false;
    sw->add_option("--config", sw_config, "Experiment config file")->required();
    sw->add_option("--decode-csv", sw_decode_csv, "Write decode trial rows here");
    sw->add_option("--robust-csv", sw_robust_csv, "Write robustness trial rows here");
    sw->add_flag("--print-config", sw_print, "Print the canonical config and digest, then exit");

    // find-curve
    auto* fc = app.add_subcommand("find-curve",
                                  "First nonsingular curve with enough affine points");
    std::uint64_t fc_modulus = 0;
    std::int64_t fc_min_points = 0;
    fc->add_option("--modulus", fc_modulus, "Prime field modulus")->required();
    fc->add_option("--min-points", fc_min_points, "Required affine point count")->required();

    // check-constants
    auto* cc = app.add_subcommand("check-constants",
                                  "Evaluate the decoding preconditions for given parameters");
    std::int64_t cc_length = 0, cc_degree = 16, cc_genus = 0;
    std::uint64_t cc_modulus = 2;
    std::string cc_epsilon = "0";
    cc->add_option("--length", cc_length, "Code length n (omit to print global constants)");
    cc->add_option("--degree", cc_degree, "Member degree")->capture_default_str();
    cc->add_option("--genus", cc_genus, "Family genus")->capture_default_str();
    cc->add_option("--modulus", cc_modulus, "Prime field modulus")->capture_default_str();
    cc->add_option("--epsilon", cc_epsilon, "Disagreement fraction, e.g. 1/200 or 0.005")
        ->capture_default_str();

    // tensor-props
    auto* tp = app.add_subcommand("tensor-props",
                                  "Spot-check tensor membership, restriction and extension");
    FamilyFlags tp_fam;
    tp_fam.attach(tp);
    std::int64_t tp_row_degree = 2, tp_col_degree = 2, tp_subset_cols = 0, tp_subset_rows = 0;
    int tp_checks = 8;
    std::uint64_t tp_seed = 1;
    tp->add_option("--row-degree", tp_row_degree, "Row code degree")->capture_default_str();
    tp->add_option("--col-degree", tp_col_degree, "Column code degree")->capture_default_str();
    tp->add_option("--subset-cols", tp_subset_cols, "Restriction width (default degree+2)");
    tp->add_option("--subset-rows", tp_subset_rows, "Restriction height (default degree+2)");
    tp->add_option("--checks", tp_checks, "Number of random checks")->capture_default_str();
    tp->add_option("--seed", tp_seed, "Sampling seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (vf->parsed())
            return run_verify_family(vf_fam, vf_degrees, vf_pairs, vf_distance_mode, vf_budget,
                                     vf_spot_checks, vf_seed, vf_mutate);
        if (dc->parsed())
            return run_decode(dc_fam, dc_rows, dc_cols, dc_degree, dc_config, dc_trial,
                              dc_mode, dc_seed, dc_trace);
        if (sw->parsed()) return run_sweep(sw_config, sw_decode_csv, sw_robust_csv, sw_print);
        if (fc->parsed()) return run_find_curve(fc_modulus, fc_min_points);
        if (cc->parsed())
            return run_check_constants(cc_length, cc_degree, cc_genus, cc_modulus, cc_epsilon);
        if (tp->parsed()) {
            if (tp_subset_cols == 0) tp_subset_cols = tp_row_degree + 2;
            if (tp_subset_rows == 0) tp_subset_rows = tp_col_degree + 2;
            return run_tensor_props(tp_fam, tp_row_degree, tp_col_degree, tp_subset_cols,
                                    tp_subset_rows, tp_checks, tp_seed);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitUsage;
}
