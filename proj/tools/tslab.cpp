// tslab command-line front end.
#include "tslab/experiments.hpp"
#include "tslab/normengine.hpp"
#include "tslab/scc.hpp"
#include "tslab/setfamilies.hpp"
#include "tslab/spaces.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace tslab;

namespace {

enum Exit { kOk = 0, kBoundViolated = 1, kResourceLimit = 2, kBadInput = 3 };

SpaceSpec load_space(const std::string& name, const std::string& config_path)
{
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw BadInputError("cannot read config file " + config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        SpaceSpec s = parse_spec_config(ss.str());
        check_well_formed(s);
        return s;
    }
    return preset(name);
}

std::pair<Index, Index> parse_window(const std::string& text)
{
    auto dots = text.find("..");
    if (dots == std::string::npos) throw BadInputError("window must look like a..b");
    try {
        Index lo = std::stoll(text.substr(0, dots));
        Index hi = std::stoll(text.substr(dots + 2));
        if (lo < 1 || hi < lo) throw BadInputError("window needs 1 <= a <= b");
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw BadInputError("window must look like a..b");
    }
}

std::uint64_t parse_seed(const std::string& text)
{
    try {
        std::size_t used = 0;
        auto v = std::stoull(text, &used, 0);
        if (used != text.size()) throw BadInputError("bad seed: " + text);
        return v;
    } catch (const std::logic_error&) {
        throw BadInputError("bad seed: " + text);
    }
}

void print_report(const ExperimentReport& r, bool json)
{
    if (json) std::cout << to_json(r).dump(2) << "\n";
    else std::cout << to_table(r);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mixed Tsirelson space toolkit: exact norms, Schreier families, special convex combinations"};
    app.require_subcommand(1);

    // norm
    auto* norm_cmd = app.add_subcommand("norm", "exact norm of a finitely supported vector");
    std::string space = "tsirelson", config, vec;
    bool exact = false, json = false, certificate = false;
    norm_cmd->add_option("--space", space, "preset name")->capture_default_str();
    norm_cmd->add_option("--config", config, "space config file (overrides --space)");
    norm_cmd->add_option("--vec", vec, "vector as index:value pairs, e.g. 2:1,3:1/2")->required();
    norm_cmd->add_flag("--exact", exact, "error instead of bounds above the allowable cap");
    norm_cmd->add_flag("--json", json, "emit JSON");
    norm_cmd->add_flag("--certificate", certificate, "print the norming functional");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    std::string suite, seed_text = std::to_string(kDefaultSeed);
    VerifyParams vp;
    std::vector<std::string> eps_text;
    std::string mass_text = "1";
    verify_cmd->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
    verify_cmd->add_option("--seed", seed_text, "64-bit seed")->capture_default_str();
    verify_cmd->add_option("--space", vp.space, "space preset (suite default when omitted)");
    verify_cmd->add_option("--count", vp.count, "number of generated cases");
    verify_cmd->add_option("--ground", vp.ground, "schreier: oracle ground set size")->capture_default_str();
    verify_cmd->add_option("--bracket-ground", vp.bracket_ground, "schreier: bracket ground set size")
        ->capture_default_str();
    verify_cmd->add_option("--j", vp.js, "lemma112: levels; toy suites: the level j");
    verify_cmd->add_option("--eps", eps_text, "lemma112: epsilons");
    verify_cmd->add_option("--theta", vp.theta, "lemma112: theta rule")->capture_default_str();
    verify_cmd->add_option("--claim-l", vp.claim_l, "lemma112: largest l in the claim check")->capture_default_str();
    verify_cmd->add_option("--claim-r", vp.claim_r, "lemma112: largest r in the claim check")->capture_default_str();
    verify_cmd->add_option("--pieces", vp.pieces, "theta1_lower: number of disjoint pieces")->capture_default_str();
    verify_cmd->add_option("--mass", mass_text, "lemma24: block l1 mass M")->capture_default_str();
    verify_cmd->add_flag("--json", json, "emit JSON");

    // distort
    auto* distort_cmd = app.add_subcommand("distort", "distortion ratio experiment");
    DistortParams dp;
    std::string dseed_text = std::to_string(kDefaultSeed);
    distort_cmd->add_option("--space", dp.space, "space preset")->capture_default_str();
    distort_cmd->add_option("--i0", dp.i0, "distorting level")->capture_default_str();
    distort_cmd->add_option("--j", dp.j, "witness level for y")->capture_default_str();
    distort_cmd->add_option("--trials", dp.trials, "number of sampled block subspaces")->capture_default_str();
    distort_cmd->add_option("--support", dp.support, "sampled positions per trial")->capture_default_str();
    distort_cmd->add_option("--seed", dseed_text, "64-bit seed")->capture_default_str();
    distort_cmd->add_flag("--json", json, "emit JSON");

    // families
    auto* fam_cmd = app.add_subcommand("families", "enumerate members of a set family");
    std::string descriptor, window = "1..8", what = "members";
    fam_cmd->add_option("descriptor", descriptor, "S(n), A(k), B(outer,inner) or P(base)")->required();
    fam_cmd->add_option("--window", window, "a..b")->capture_default_str();
    fam_cmd->add_option("--what", what, "members | maximal | count")
        ->check(CLI::IsMember({"members", "maximal", "count"}))
        ->capture_default_str();

    // scc
    auto* scc_cmd = app.add_subcommand("scc", "special convex combinations");
    scc_cmd->require_subcommand(1);
    auto* make_cmd = scc_cmd->add_subcommand("make", "build a basic or relative s.c.c.");
    std::string eps_str = "1/2", stream = "naturals", kind = "basic", strategy = "recursive";
    int level = 1;
    make_cmd->add_option("--eps", eps_str, "epsilon")->capture_default_str();
    make_cmd->add_option("--n", level, "level n (or j)")->capture_default_str();
    make_cmd->add_option("--D", stream, "index stream: naturals, evens, odds, a+bn, list:...")->capture_default_str();
    make_cmd->add_option("--kind", kind, "basic | relative")->check(CLI::IsMember({"basic", "relative"}))
        ->capture_default_str();
    make_cmd->add_option("--strategy", strategy, "recursive | compact")
        ->check(CLI::IsMember({"recursive", "compact"}))
        ->capture_default_str();
    make_cmd->add_option("--space", space, "space for the relative kind")->capture_default_str();
    auto* check_cmd = scc_cmd->add_subcommand("check", "check a vector is a basic s.c.c.");
    check_cmd->add_option("--vec", vec, "vector")->required();
    check_cmd->add_option("--eps", eps_str, "epsilon")->capture_default_str();
    check_cmd->add_option("--n", level, "level")->capture_default_str();
    std::string relative_space;
    check_cmd->add_option("--relative", relative_space, "check the relative kind against this space");

    // spaces
    auto* spaces_cmd = app.add_subcommand("spaces", "space presets");
    spaces_cmd->require_subcommand(1);
    auto* list_cmd = spaces_cmd->add_subcommand("list", "list preset names");
    auto* show_cmd = spaces_cmd->add_subcommand("show", "show a preset as config text");
    std::string show_name;
    show_cmd->add_option("name", show_name, "preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }

    try {
        if (*norm_cmd) {
            SpaceSpec s = load_space(space, config);
            s.exact = exact;
            SparseVector x = parse_vector(vec);
            NormResult r = norm(x, s);
            if (json) {
                nlohmann::json j{{"space", s.name},
                                 {"vector", to_string(x)},
                                 {"value", rational_json(r.value)},
                                 {"exact", r.exact},
                                 {"lower", rational_json(r.lower)},
                                 {"upper", rational_json(r.upper)},
                                 {"subproblems", r.subproblems_evaluated},
                                 {"approximate_weights", s.approximate_weights}};
                if (certificate) j["certificate"] = to_json(r.certificate);
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << to_string(r.value) << "  (" << to_decimal(r.value) << ")";
                if (!r.exact) std::cout << "  bounds [" << to_string(r.lower) << ", " << to_string(r.upper) << "]";
                if (s.approximate_weights) std::cout << "  approximate-weights";
                std::cout << "\n";
                if (certificate) std::cout << to_string(r.certificate) << "\n";
            }
            return kOk;
        }
        if (*verify_cmd) {
            vp.seed = parse_seed(seed_text);
            for (const auto& e : eps_text) vp.epsilons.push_back(parse_rational(e));
            vp.mass = parse_rational(mass_text);
            if (suite != "lemma112" && !vp.js.empty()) {
                vp.j = vp.js.front();
                vp.js.clear();
            }
            ExperimentReport r = verify(suite, vp);
            print_report(r, json);
            return r.exit_code() == 0 ? kOk : kBoundViolated;
        }
        if (*distort_cmd) {
            dp.seed = parse_seed(dseed_text);
            ExperimentReport r = distort(dp);
            print_report(r, json);
            return r.exit_code() == 0 ? kOk : kBoundViolated;
        }
        if (*fam_cmd) {
            auto f = parse_family(descriptor);
            auto [lo, hi] = parse_window(window);
            if (what == "count") {
                std::cout << members_in_window(*f, lo, hi).size() << "\n";
            } else {
                auto sets = what == "maximal" ? maximal_members(*f, lo, hi) : members_in_window(*f, lo, hi);
                for (const auto& s : sets) std::cout << to_string(s) << "\n";
            }
            return kOk;
        }
        if (*make_cmd) {
            Q eps = parse_rational(eps_str);
            IndexStream d = IndexStream::parse(stream);
            SccWitness w;
            if (kind == "relative") w = make_relative_scc(eps, level, preset(space), d);
            else w = make_basic_scc(eps, level, d, strategy == "compact" ? SccStrategy::Compact : SccStrategy::Recursive);
            std::cout << to_json(w).dump(2) << "\n";
            return kOk;
        }
        if (*check_cmd) {
            Q eps = parse_rational(eps_str);
            SparseVector x = parse_vector(vec);
            bool ok;
            if (relative_space.empty()) {
                ok = check_basic_scc(x, eps, level);
            } else {
                SpaceSpec s = preset(relative_space);
                ok = check_basic_scc(x, eps, level, &s);
            }
            std::cout << (ok ? "pass" : "fail") << "\n";
            return ok ? kOk : kBoundViolated;
        }
        if (*list_cmd) {
            for (const auto& n : preset_names()) std::cout << n << "\n";
            return kOk;
        }
        if (*show_cmd) {
            SpaceSpec s = preset(show_name);
            std::cout << "# " << s.name << (s.toy ? "  [" + std::string(kToyBanner) + "]" : "") << "\n"
                      << to_config(s);
            return kOk;
        }
    } catch (const ResourceLimitError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kResourceLimit;
    } catch (const BadInputError& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return kBadInput;
    }
    return kOk;
}
