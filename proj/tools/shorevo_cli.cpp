#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "shorevo/io.hpp"
#include "shorevo/pipeline.hpp"
#include "shorevo/plot.hpp"
#include "shorevo/sim.hpp"
#include "shorevo/traj_eval.hpp"

namespace {

using namespace shorevo;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitEstimation = 3;

int cmd_simulate(const SceneParams& scene, const MotionParams& motion,
                 const NoiseParams& noise, const CameraIntrinsics& k,
                 const std::string& out_dir) {
    SceneParams s = scene;
    NoiseParams n = noise;
    std::uint64_t seed;
    if (seed_override(&seed)) {
        s.seed = seed;
        n.noise_seed = seed ^ 0x94D049BB133111EBull;
    }
    const SimResult sim = generate(s, motion, n, k);
    oracle_check(sim, n);
    write_sim(sim, out_dir);
    std::cout << "wrote dataset with " << sim.dataset.frames.size()
              << " frames, " << sim.dataset.tracks.size() << " observations to "
              << out_dir << "\n";
    return kExitOk;
}

int cmd_run(const std::string& dataset_dir, const std::string& out_file,
            const std::string& diag_file) {
    const Dataset ds = load_dataset(dataset_dir);
    const RunResult result = shorevo::run(ds);
    save_trajectory(result.trajectory, out_file);
    if (!diag_file.empty()) {
        std::ofstream out(diag_file);
        for (const auto& d : result.diagnostics) {
            json j = {{"frame", d.frame},
                      {"correspondences", d.correspondences},
                      {"inliers", d.inliers},
                      {"mlesac_score", d.mlesac_score},
                      {"mlesac_iterations", d.mlesac_iterations},
                      {"refine_initial_cost", d.refine_initial_cost},
                      {"refine_final_cost", d.refine_final_cost},
                      {"coasting", d.coasting}};
            out << j.dump() << "\n";
        }
        if (result.tracking_lost) {
            json j = {{"tracking_lost", true}, {"reason", result.failure}};
            out << j.dump() << "\n";
        }
    }
    if (result.tracking_lost) {
        std::cerr << "tracking lost: " << result.failure
                  << " (partial trajectory written)\n";
        return kExitEstimation;
    }
    std::cout << "estimated " << result.trajectory.size() << " poses -> "
              << out_file << "\n";
    return kExitOk;
}

double skewness(const std::vector<double>& xs) {
    if (xs.size() < 3) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double m2 = 0.0, m3 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= xs.size();
    m3 /= xs.size();
    return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

int cmd_eval(const std::string& gt_file, const std::string& vo_file,
             const std::string& out_dir, int samples) {
    std::filesystem::create_directories(out_dir);

    std::vector<PlanarPoint> gt_points;
    for (const auto& fix : load_gps(gt_file))
        gt_points.emplace_back(fix.east_m, fix.north_m);
    // The VO frame is the first camera frame: image x forward, image y down,
    // optical axis abeam. Its horizontal plane is therefore spanned by the
    // x and z components; the affine alignment absorbs the remaining yaw
    // between that plane and east/north.
    std::vector<PlanarPoint> vo_points;
    for (const auto& e : load_trajectory(vo_file))
        vo_points.emplace_back(e.position.x(), e.position.z());

    const CatmullRomSpline g = CatmullRomSpline::fit(gt_points);
    const CatmullRomSpline v = CatmullRomSpline::fit(vo_points);
    const AffineTransform2D aff = fit_affine(g, v, samples);
    const ErrorReport rep = evaluate(g, v, samples);

    const std::filesystem::path dir(out_dir);
    {
        std::ofstream out(dir / "errors.csv");
        out << "u,distance_m,error_m\n";
        for (size_t i = 0; i < rep.errors.size(); ++i)
            out << format_double(rep.fractions[i]) << ","
                << format_double(rep.distance_m[i]) << ","
                << format_double(rep.errors[i]) << "\n";
    }
    {
        json j = {{"max", rep.max_error},
                  {"mean", rep.mean_error},
                  {"rmse", rep.rmse},
                  {"samples", samples},
                  {"skewness", skewness(rep.errors)},
                  {"gt_length_m", g.total_length()},
                  {"vo_length_m", v.total_length()},
                  {"affine_degenerate", aff.degenerate},
                  {"histogram_edges", rep.histogram_edges},
                  {"histogram_counts", rep.histogram_counts}};
        std::ofstream out(dir / "stats.json");
        out << j.dump(2) << "\n";
    }
    {
        // Aligned curve samples for the overlay plot.
        std::ofstream out(dir / "overlay.csv");
        out << "u,gt_e,gt_n,vo_e,vo_n\n";
        const int n = 400;
        for (int i = 0; i < n; ++i) {
            const double u = static_cast<double>(i) / (n - 1);
            const Vec2 pg = g.point_at_fraction(u).vec();
            const Vec2 pv = aff.apply(v.point_at_fraction(u).vec());
            out << format_double(u) << "," << format_double(pg.x()) << ","
                << format_double(pg.y()) << "," << format_double(pv.x()) << ","
                << format_double(pv.y()) << "\n";
        }
    }
    std::cout << "max " << rep.max_error << " m, mean " << rep.mean_error
              << " m, rmse " << rep.rmse << " m -> " << out_dir << "\n";
    return kExitOk;
}

int cmd_plot(const std::string& eval_dir) {
    const std::filesystem::path dir(eval_dir);

    // Overlay from the sampled aligned curves.
    std::ifstream overlay(dir / "overlay.csv");
    if (!overlay) throw ParseError("cannot open " + (dir / "overlay.csv").string());
    std::string line;
    std::getline(overlay, line);
    std::vector<PlanarPoint> gt, vo;
    while (std::getline(overlay, line)) {
        double u, ge, gn, ve, vn;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &u, &ge, &gn, &ve,
                        &vn) != 5)
            throw ParseError((dir / "overlay.csv").string() + ": malformed row");
        gt.emplace_back(ge, gn);
        vo.emplace_back(ve, vn);
    }
    const CatmullRomSpline g = CatmullRomSpline::fit(gt);
    const CatmullRomSpline v = CatmullRomSpline::fit(vo);
    plot_overlay(g, v, AffineTransform2D{}, dir / "overlay.svg");

    // Error series and histogram from the eval outputs.
    std::ifstream stats_in(dir / "stats.json");
    if (!stats_in) throw ParseError("cannot open " + (dir / "stats.json").string());
    json stats;
    stats_in >> stats;

    ErrorReport rep;
    std::ifstream errors(dir / "errors.csv");
    if (!errors) throw ParseError("cannot open " + (dir / "errors.csv").string());
    std::getline(errors, line);
    while (std::getline(errors, line)) {
        double u, d, e;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &u, &d, &e) != 3)
            throw ParseError((dir / "errors.csv").string() + ": malformed row");
        rep.fractions.push_back(u);
        rep.distance_m.push_back(d);
        rep.errors.push_back(e);
        rep.max_error = std::max(rep.max_error, e);
    }
    rep.histogram_edges = stats["histogram_edges"].get<std::vector<double>>();
    rep.histogram_counts = stats["histogram_counts"].get<std::vector<int>>();

    plot_error_vs_distance(rep, dir / "error_vs_distance.svg");
    plot_histogram(rep, dir / "histogram.svg");
    std::cout << "wrote overlay.svg, error_vs_distance.svg, histogram.svg in "
              << eval_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shore-observing monocular visual odometry toolkit"};
    app.require_subcommand(1);

    // simulate
    SceneParams scene;
    MotionParams motion;
    NoiseParams noise;
    CameraIntrinsics intrinsics;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
    auto* sg = simulate->add_option_group("scene");
    sg->add_option("--landmarks", scene.landmark_count);
    sg->add_option("--depth-min", scene.depth_min);
    sg->add_option("--depth-max", scene.depth_max);
    sg->add_option("--seed", scene.seed);
    sg->add_flag("--shore-right", [&scene](size_t) { scene.shore_on_left = false; },
                 "Place the shore on the starboard side");
    auto* mg = simulate->add_option_group("motion");
    mg->add_option("--duration", motion.duration);
    mg->add_option("--fps", motion.fps);
    mg->add_option("--imu-rate", motion.imu_rate);
    mg->add_option("--gps-rate", motion.gps_rate);
    mg->add_option("--speed", motion.speed);
    mg->add_option("--wave-amplitude", motion.wave_amplitude_deg);
    mg->add_option("--wave-period", motion.wave_period_s);
    auto* ng = simulate->add_option_group("noise");
    ng->add_option("--pixel-sigma", noise.pixel_sigma);
    ng->add_option("--outlier-rate", noise.outlier_rate);
    ng->add_option("--gyro-sigma", noise.gyro_sigma);
    ng->add_option("--sog-sigma", noise.sog_sigma);
    ng->add_option("--gps-sigma", noise.gps_sigma);
    ng->add_option("--noise-seed", noise.noise_seed);
    simulate->add_option("--out", sim_out, "Output dataset directory")->required();

    // run
    std::string dataset_dir, traj_out, diag_out;
    auto* run_cmd = app.add_subcommand("run", "Estimate a trajectory from a dataset");
    run_cmd->add_option("--dataset", dataset_dir)->required();
    run_cmd->add_option("--out", traj_out)->required();
    run_cmd->add_option("--diag", diag_out, "Per-frame diagnostics (jsonl)");

    // eval
    std::string gt_file, vo_file, eval_out;
    int samples = 200;
    auto* eval_cmd = app.add_subcommand("eval", "Compare a trajectory with GPS truth");
    eval_cmd->add_option("--gt", gt_file)->required();
    eval_cmd->add_option("--vo", vo_file)->required();
    eval_cmd->add_option("--out-dir", eval_out)->required();
    eval_cmd->add_option("--samples", samples);

    // plot
    std::string plot_dir;
    auto* plot_cmd = app.add_subcommand("plot", "Render SVG plots from an eval directory");
    plot_cmd->add_option("--eval-dir", plot_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(scene, motion, noise, intrinsics, sim_out);
        if (run_cmd->parsed()) return cmd_run(dataset_dir, traj_out, diag_out);
        if (eval_cmd->parsed()) return cmd_eval(gt_file, vo_file, eval_out, samples);
        if (plot_cmd->parsed()) return cmd_plot(plot_dir);
    } catch (const TrackingLostError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEstimation;
    } catch (const NoConsensusError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEstimation;
    } catch (const ZeroSpeedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEstimation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
