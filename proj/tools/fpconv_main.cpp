#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpconv/acceptance.hpp"
#include "fpconv/errors.hpp"
#include "fpconv/freeconv.hpp"
#include "fpconv/json_io.hpp"
#include "fpconv/montecarlo.hpp"
#include "fpconv/potential.hpp"

using nlohmann::json;

namespace {

struct GridFlag {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    bool set = false;
};

GridFlag parse_grid(const std::string& token) {
    GridFlag g;
    char colon1 = 0, colon2 = 0;
    std::istringstream is(token);
    if (!(is >> g.start >> colon1 >> g.stop >> colon2 >> g.count) || colon1 != ':' ||
        colon2 != ':' || !is.eof() || g.count < 1)
        throw fpconv::ConfigError("bad grid spec '" + token + "' (want start:stop:count)");
    if (g.count > 1 && !(g.stop > g.start))
        throw fpconv::ConfigError("grid must be strictly increasing");
    g.set = true;
    return g;
}

std::vector<double> grid_values(const GridFlag& g) {
    std::vector<double> v;
    for (int i = 0; i < g.count; ++i)
        v.push_back(g.count == 1 ? g.start : g.start + (g.stop - g.start) * i / (g.count - 1.0));
    return v;
}

std::map<std::string, double> parse_tols(const std::vector<std::string>& tokens) {
    std::map<std::string, double> out;
    for (const auto& t : tokens) {
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw fpconv::ConfigError("bad --tol '" + t + "' (want NAME=VALUE)");
        try {
            out[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
        } catch (...) {
            throw fpconv::ConfigError("bad --tol value in '" + t + "'");
        }
    }
    return out;
}

json summary_json(const fpconv::ConvolutionSummary& sm) {
    json j;
    j["h_star"] = fpconv::json_number(sm.h_star);
    j["g_star"] = fpconv::json_number(sm.g_star);
    j["z_star"] = fpconv::json_number(sm.z_star);
    j["h_star_kind"] = sm.h_star_kind == fpconv::HStarKind::CriticalPoint ? "critical_point"
                                                                          : "domain_endpoint";
    j["f_domain_upper"] = fpconv::json_number(sm.f_domain_upper);
    return j;
}

std::string config_token(const std::string& kind, const fpconv::Measure& mu,
                         const fpconv::Measure& nu, const std::optional<double>& z,
                         const GridFlag& grid) {
    std::ostringstream os;
    os << kind << "|" << fpconv::measure_to_json(mu).dump() << "|"
       << fpconv::measure_to_json(nu).dump();
    if (z) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *z);
        os << "|z=" << buf;
    }
    if (grid.set) os << "|grid=" << grid.start << ":" << grid.stop << ":" << grid.count;
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"log potentials, support edges and Stieltjes transforms of free additive convolutions"};
    app.require_subcommand(1);

    std::string mu_spec, nu_spec, kind_token = "e", out_dir = ".", grid_token;
    std::optional<double> z_flag;
    std::uint64_t seed = 12345;
    int n = 256, trials = 10;
    std::vector<std::string> tol_tokens;

    auto add_pair_flags = [&](CLI::App* cmd, bool need_pair) {
        cmd->add_option("--mu", mu_spec, "mu measure: JSON, @file, sc[:beta], mp[:beta]")
            ->required(need_pair);
        cmd->add_option("--nu", nu_spec, "nu measure: JSON, @file, sc[:beta], mp[:beta]")
            ->required(need_pair);
    };

    auto* ep = app.add_subcommand("endpoint", "left support edge of mu boxplus nu");
    add_pair_flags(ep, true);

    auto* pot = app.add_subcommand("potential", "log potential of mu boxplus nu at z");
    add_pair_flags(pot, true);
    pot->add_option("--z", z_flag, "evaluation point (z < z_star)");
    pot->add_option("--z-grid", grid_token, "start:stop:count grid of z values");

    auto* sti = app.add_subcommand("stieltjes", "Stieltjes transform of mu boxplus nu at z");
    add_pair_flags(sti, true);
    sti->add_option("--z", z_flag, "evaluation point (z < z_star)");
    sti->add_option("--z-grid", grid_token, "start:stop:count grid of z values");

    auto* prof = app.add_subcommand("profile", "sampled curves (E / F / Ginv / J) as CSV");
    add_pair_flags(prof, true);
    prof->add_option("--kind", kind_token, "one of e, f, ginv, j")->required();
    prof->add_option("--z", z_flag, "z for the E profile");
    prof->add_option("--z-grid", grid_token, "abscissa grid start:stop:count");
    prof->add_option("--out", out_dir, "output directory for CSV files");

    auto* mc = app.add_subcommand("mc", "random-matrix cross check of edge and potential");
    add_pair_flags(mc, true);
    mc->add_option("--z", z_flag, "potential evaluation point (default z_star - 0.5)");
    mc->add_option("--n", n, "matrix dimension");
    mc->add_option("--trials", trials, "number of independent trials");
    mc->add_option("--seed", seed, "master seed");
    mc->add_option("--out", out_dir, "output directory for the trial CSV");

    auto* st = app.add_subcommand("selftest", "run the built-in verification suite");
    st->add_option("--tol", tol_tokens, "override a tolerance, NAME=VALUE (c1..c10)");
    st->add_option("--out", out_dir, "output directory for profile CSVs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (st->parsed()) {
            const auto tols = parse_tols(tol_tokens);
            const auto results = fpconv::acceptance::run_all(
                std::cout, tols, out_dir == "." ? "acceptance_profiles" : out_dir);
            return fpconv::acceptance::all_passed(results) ? 0 : 1;
        }

        const fpconv::Measure mu = fpconv::parse_measure_spec(mu_spec);
        const fpconv::Measure nu = fpconv::parse_measure_spec(nu_spec);
        GridFlag grid;
        if (!grid_token.empty()) grid = parse_grid(grid_token);

        if (ep->parsed()) {
            const auto sm = fpconv::endpoint_summary(mu, nu);
            std::cout << summary_json(sm).dump(2) << "\n";
            return 0;
        }

        if (pot->parsed() || sti->parsed()) {
            std::vector<double> zs;
            if (z_flag) zs.push_back(*z_flag);
            if (grid.set) {
                const auto more = grid_values(grid);
                zs.insert(zs.end(), more.begin(), more.end());
            }
            if (zs.empty()) throw fpconv::ConfigError("need --z or --z-grid");
            const fpconv::FreeConvolution fc(mu, nu);
            const bool want_potential = pot->parsed();
            // Grid points are independent; fan them out and merge by index.
            std::vector<json> rows(zs.size());
            std::exception_ptr first_error;
            std::mutex err_mtx;
            const unsigned workers = std::min<unsigned>(
                std::max(1u, std::thread::hardware_concurrency()),
                static_cast<unsigned>(zs.size()));
            std::atomic<std::size_t> next{0};
            auto work = [&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= zs.size()) return;
                    try {
                        json row;
                        row["z"] = fpconv::json_number(zs[i]);
                        if (want_potential) {
                            const auto res = fpconv::u_variational(fc, zs[i]);
                            row["u"] = fpconv::json_number(res.u);
                            row["minimizer_g"] = fpconv::json_number(res.minimizer_g);
                            row["e_at_min"] = fpconv::json_number(res.e_at_min);
                            row["fixed_point_residual"] =
                                fpconv::json_number(res.fixed_point_residual);
                            row["method"] = "variational_at_root";
                        } else {
                            const auto root = fc.stieltjes(zs[i]);
                            row["g"] = fpconv::json_number(root.g);
                            row["h_less"] = fpconv::json_number(root.h_less);
                            row["fixed_point_residual"] =
                                fpconv::json_number(root.fixed_point_residual);
                        }
                        rows[i] = std::move(row);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mtx);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            };
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& th : pool) th.join();
            if (first_error) std::rethrow_exception(first_error);
            json arr = json::array();
            for (auto& row : rows) arr.push_back(std::move(row));
            std::cout << (arr.size() == 1 ? arr[0] : arr).dump(2) << "\n";
            return 0;
        }

        if (prof->parsed()) {
            fpconv::ProfileKind kind;
            if (kind_token == "e") kind = fpconv::ProfileKind::EProfile;
            else if (kind_token == "f") kind = fpconv::ProfileKind::FProfile;
            else if (kind_token == "ginv") kind = fpconv::ProfileKind::GInvProfile;
            else if (kind_token == "j") kind = fpconv::ProfileKind::JProfile;
            else throw fpconv::ConfigError("--kind must be one of e, f, ginv, j");
            std::optional<fpconv::GridSpec> gs;
            if (grid.set) gs = fpconv::GridSpec{grid.start, grid.stop, grid.count};
            const auto table = fpconv::emit_profile(mu, nu, z_flag, kind, gs);
            const auto paths = fpconv::write_profile_csv(
                table, out_dir, config_token(kind_token, mu, nu, z_flag, grid));
            json j;
            j["curve_csv"] = paths.first;
            j["annotations_csv"] = paths.second;
            j["rows"] = table.abscissa.size();
            j["annotations"] = table.annotations.size();
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (mc->parsed()) {
            fpconv::EnsembleSpec spec;
            if (mu.kind() == fpconv::MeasureKind::Semicircle) {
                spec.kind = fpconv::EnsembleKind::Goe;
                spec.beta = mu.beta();
            } else if (mu.kind() == fpconv::MeasureKind::MarchenkoPastur) {
                spec.kind = fpconv::EnsembleKind::Wishart;
                spec.beta = mu.beta();
            } else {
                throw fpconv::ConfigError("mc --mu must be a semicircle or marchenko_pastur law");
            }
            spec.nu = nu;
            spec.n = n;
            spec.trials = trials;
            spec.seed = seed;

            fpconv::FreeConvolution fc(mu, nu);
            const double zs = fc.summary().z_star;
            const double z = z_flag.value_or(zs - 0.5);
            const auto run = fpconv::run_ensemble(spec, z);
            const auto pred = fpconv::u_variational(fc, z);

            std::filesystem::create_directories(out_dir);
            const std::string csv_path = out_dir + "/mc_trials.csv";
            std::ofstream csv(csv_path);
            csv << "trial,min_eig,potential_at_z\n";
            char buf[96];
            for (const auto& row : run.rows) {
                std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", row.trial, row.min_eig,
                              row.potential_at_z);
                csv << buf;
            }

            json j;
            j["n"] = run.n;
            j["trials"] = run.trials;
            j["z"] = fpconv::json_number(z);
            j["achieved_beta"] = fpconv::json_number(run.achieved_beta);
            j["empirical_edge"] = fpconv::json_number(run.edge_mean);
            j["empirical_mean"] = fpconv::json_number(run.potential_mean);
            j["predicted_edge"] = fpconv::json_number(zs);
            j["predicted"] = fpconv::json_number(pred.u);
            j["abs_error"] = fpconv::json_number(std::fabs(run.potential_mean - pred.u));
            j["abs_error_edge"] = fpconv::json_number(std::fabs(run.edge_mean - zs));
            j["csv"] = csv_path;
            std::cout << j.dump(2) << "\n";
            return 0;
        }
    } catch (const fpconv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fpconv::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
