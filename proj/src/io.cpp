#include "shorevo/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace shorevo {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void PipelineConfig::validate() const {
    if (track_max < 2) throw SchemaError("config: track_max must be >= 2");
    if (refine_window < 2 || refine_window > track_max)
        throw SchemaError("config: refine_window must satisfy 2 <= window <= track_max");
    if (!intrinsics.valid())
        throw SchemaError("config: invalid intrinsics (positive focal, principal "
                          "point inside image)");
    if (!imu_alignment.valid())
        throw SchemaError("config: imu_alignment is not orthogonal");
    if (!allow_cutoff_override && !mlesac.cutoff_in_nominal_range())
        throw SchemaError(
            "config: mlesac.cos_cutoff outside the nominal [cos 7deg, cos 3deg] "
            "range; set allow_cutoff_override to use it anyway");
    if (mlesac.min_subset < 2)
        throw SchemaError("config: mlesac.min_subset must be >= 2");
}

namespace {

// ---------------------------------------------------------------------------
// CSV helpers with line-precise diagnostics
// ---------------------------------------------------------------------------

struct CsvReader {
    std::ifstream in;
    std::string file;
    int line_no = 0;

    CsvReader(const std::filesystem::path& path, const std::string& header)
        : in(path), file(path.string()) {
        if (!in)
            throw ParseError("cannot open " + file);
        std::string line;
        if (!std::getline(in, line))
            throw ParseError(file + ": empty file");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line != header)
            throw SchemaError(file + ":1: expected header '" + header +
                              "', got '" + line + "'");
    }

    bool next(std::vector<std::string>* fields) {
        std::string line;
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) return next(fields);
        fields->clear();
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) fields->push_back(cell);
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(file + ":" + std::to_string(line_no) + ": " + what);
    }

    double num(const std::string& s) const {
        try {
            size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) fail("trailing characters in number '" + s + "'");
            return v;
        } catch (const std::invalid_argument&) {
            fail("not a number: '" + s + "'");
        } catch (const std::out_of_range&) {
            fail("number out of range: '" + s + "'");
        }
    }

    int integer(const std::string& s) const {
        try {
            size_t pos = 0;
            const int v = std::stoi(s, &pos);
            if (pos != s.size()) fail("trailing characters in integer '" + s + "'");
            return v;
        } catch (const std::exception&) {
            fail("not an integer: '" + s + "'");
        }
    }
};

Mat3 mat_from_json(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 9)
        throw SchemaError("config: " + key + " must be 9 row-major values");
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = j.at(static_cast<size_t>(3 * r + c)).get<double>();
    return m;
}

json mat_to_json(const Mat3& m) {
    json j = json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) j.push_back(m(r, c));
    return j;
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(file.string() + ": " + e.what());
    }

    PipelineConfig cfg;
    try {
        if (j.contains("intrinsics")) {
            const auto& k = j["intrinsics"];
            cfg.intrinsics.fx = k.value("fx", cfg.intrinsics.fx);
            cfg.intrinsics.fy = k.value("fy", cfg.intrinsics.fy);
            cfg.intrinsics.cx = k.value("cx", cfg.intrinsics.cx);
            cfg.intrinsics.cy = k.value("cy", cfg.intrinsics.cy);
            cfg.intrinsics.width = k.value("width", cfg.intrinsics.width);
            cfg.intrinsics.height = k.value("height", cfg.intrinsics.height);
        }
        if (j.contains("imu_alignment"))
            cfg.imu_alignment.m = mat_from_json(j["imu_alignment"], "imu_alignment");
        if (j.contains("imu_bias")) {
            const auto& b = j["imu_bias"];
            if (!b.is_array() || b.size() != 3)
                throw SchemaError("config: imu_bias must be 3 values");
            cfg.imu_alignment.bias = Vec3(b[0].get<double>(), b[1].get<double>(),
                                          b[2].get<double>());
        }
        if (j.contains("mlesac")) {
            const auto& m = j["mlesac"];
            cfg.mlesac.cos_cutoff = m.value("cos_cutoff", cfg.mlesac.cos_cutoff);
            cfg.mlesac.max_iterations =
                m.value("max_iterations", cfg.mlesac.max_iterations);
            cfg.mlesac.min_subset = m.value("min_subset", cfg.mlesac.min_subset);
            cfg.mlesac.seed = m.value("seed", cfg.mlesac.seed);
            cfg.mlesac.min_inliers = m.value("min_inliers", cfg.mlesac.min_inliers);
            cfg.allow_cutoff_override =
                m.value("allow_cutoff_override", cfg.allow_cutoff_override);
        }
        if (j.contains("window")) {
            const auto& w = j["window"];
            cfg.track_max = w.value("track_max", cfg.track_max);
            cfg.refine_window = w.value("refine_window", cfg.refine_window);
            cfg.min_tracks_per_frame =
                w.value("min_tracks_per_frame", cfg.min_tracks_per_frame);
        }
        if (j.contains("gn")) {
            const auto& g = j["gn"];
            cfg.gn.max_iterations = g.value("max_iterations", cfg.gn.max_iterations);
            cfg.gn.cost_tolerance = g.value("cost_tolerance", cfg.gn.cost_tolerance);
            cfg.gn.step_tolerance = g.value("step_tolerance", cfg.gn.step_tolerance);
            cfg.gn.refine_rotations =
                g.value("refine_rotations", cfg.gn.refine_rotations);
            cfg.gn.damping = g.value("damping", cfg.gn.damping);
        }
        if (j.contains("eval")) {
            const auto& e = j["eval"];
            cfg.eval_samples = e.value("samples", cfg.eval_samples);
            cfg.histogram_bins = e.value("histogram_bins", cfg.histogram_bins);
        }
    } catch (const json::exception& e) {
        throw SchemaError(file.string() + ": " + e.what());
    }

    std::uint64_t seed;
    if (seed_override(&seed)) cfg.mlesac.seed = seed;

    cfg.validate();
    return cfg;
}

void save_config(const PipelineConfig& cfg, const std::filesystem::path& file) {
    json j;
    j["intrinsics"] = {{"fx", cfg.intrinsics.fx}, {"fy", cfg.intrinsics.fy},
                       {"cx", cfg.intrinsics.cx}, {"cy", cfg.intrinsics.cy},
                       {"width", cfg.intrinsics.width},
                       {"height", cfg.intrinsics.height}};
    j["imu_alignment"] = mat_to_json(cfg.imu_alignment.m);
    j["imu_bias"] = {cfg.imu_alignment.bias.x(), cfg.imu_alignment.bias.y(),
                     cfg.imu_alignment.bias.z()};
    j["mlesac"] = {{"cos_cutoff", cfg.mlesac.cos_cutoff},
                   {"max_iterations", cfg.mlesac.max_iterations},
                   {"min_subset", cfg.mlesac.min_subset},
                   {"seed", cfg.mlesac.seed},
                   {"min_inliers", cfg.mlesac.min_inliers},
                   {"allow_cutoff_override", cfg.allow_cutoff_override}};
    j["window"] = {{"track_max", cfg.track_max},
                   {"refine_window", cfg.refine_window},
                   {"min_tracks_per_frame", cfg.min_tracks_per_frame}};
    j["gn"] = {{"max_iterations", cfg.gn.max_iterations},
               {"cost_tolerance", cfg.gn.cost_tolerance},
               {"step_tolerance", cfg.gn.step_tolerance},
               {"refine_rotations", cfg.gn.refine_rotations},
               {"damping", cfg.gn.damping}};
    j["eval"] = {{"samples", cfg.eval_samples},
                 {"histogram_bins", cfg.histogram_bins}};

    std::ofstream out(file);
    if (!out) throw ParseError("cannot write " + file.string());
    out << j.dump(2) << "\n";
}

Dataset load_dataset(const std::filesystem::path& dir) {
    Dataset ds;
    ds.config = load_config(dir / "config.json");

    {
        CsvReader r(dir / "frames.csv", "frame,t_sec");
        std::vector<std::string> f;
        while (r.next(&f)) {
            if (f.size() != 2) r.fail("expected 2 fields");
            ds.frames.push_back({r.integer(f[0]), r.num(f[1])});
        }
        for (size_t i = 1; i < ds.frames.size(); ++i)
            if (ds.frames[i].t <= ds.frames[i - 1].t ||
                ds.frames[i].frame_index <= ds.frames[i - 1].frame_index)
                throw ParseError(dir.string() +
                                 "/frames.csv: frames not strictly increasing");
    }

    std::set<int> known_frames;
    for (const auto& fc : ds.frames) known_frames.insert(fc.frame_index);

    {
        CsvReader r(dir / "tracks.csv", "frame,feature_id,u_px,v_px");
        std::vector<std::string> f;
        while (r.next(&f)) {
            if (f.size() != 4) r.fail("expected 4 fields");
            TrackObservation obs{r.integer(f[0]), r.integer(f[1]), r.num(f[2]),
                                 r.num(f[3])};
            if (!known_frames.count(obs.frame))
                throw CrossRefError(dir.string() + "/tracks.csv:" +
                                    std::to_string(r.line_no) +
                                    ": frame " + std::to_string(obs.frame) +
                                    " not present in frames.csv");
            ds.tracks.push_back(obs);
        }
    }

    {
        CsvReader r(dir / "imu.csv", "t_sec,wx,wy,wz");
        std::vector<std::string> f;
        while (r.next(&f)) {
            if (f.size() != 4) r.fail("expected 4 fields");
            ds.imu.push_back({r.num(f[0]), Vec3(r.num(f[1]), r.num(f[2]), r.num(f[3]))});
        }
        for (size_t i = 1; i < ds.imu.size(); ++i)
            if (ds.imu[i].t <= ds.imu[i - 1].t)
                throw ParseError(dir.string() + "/imu.csv: timestamps not increasing");
    }

    {
        CsvReader r(dir / "gps.csv", "frame,east_m,north_m,sog_mps");
        std::vector<std::string> f;
        while (r.next(&f)) {
            if (f.size() != 4) r.fail("expected 4 fields");
            GpsFix fix{r.integer(f[0]), r.num(f[1]), r.num(f[2]), r.num(f[3])};
            if (!known_frames.count(fix.frame))
                throw CrossRefError(dir.string() + "/gps.csv:" +
                                    std::to_string(r.line_no) + ": frame " +
                                    std::to_string(fix.frame) +
                                    " not present in frames.csv");
            ds.gps.push_back(fix);
        }
    }

    return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_config(ds.config, dir / "config.json");

    {
        std::ofstream out(dir / "frames.csv");
        out << "frame,t_sec\n";
        for (const auto& fc : ds.frames)
            out << fc.frame_index << "," << format_double(fc.t) << "\n";
    }
    {
        std::ofstream out(dir / "tracks.csv");
        out << "frame,feature_id,u_px,v_px\n";
        for (const auto& t : ds.tracks)
            out << t.frame << "," << t.feature_id << "," << format_double(t.u_px)
                << "," << format_double(t.v_px) << "\n";
    }
    {
        std::ofstream out(dir / "imu.csv");
        out << "t_sec,wx,wy,wz\n";
        for (const auto& s : ds.imu)
            out << format_double(s.t) << "," << format_double(s.w.x()) << ","
                << format_double(s.w.y()) << "," << format_double(s.w.z()) << "\n";
    }
    {
        std::ofstream out(dir / "gps.csv");
        out << "frame,east_m,north_m,sog_mps\n";
        for (const auto& g : ds.gps)
            out << g.frame << "," << format_double(g.east_m) << ","
                << format_double(g.north_m) << "," << format_double(g.sog_mps)
                << "\n";
    }
}

Trajectory load_trajectory(const std::filesystem::path& file) {
    CsvReader r(file, "frame,x,y,z,qw,qx,qy,qz");
    Trajectory traj;
    std::vector<std::string> f;
    while (r.next(&f)) {
        if (f.size() != 8) r.fail("expected 8 fields");
        TrajectoryEntry e;
        e.frame = r.integer(f[0]);
        e.position = Vec3(r.num(f[1]), r.num(f[2]), r.num(f[3]));
        e.orientation =
            Eigen::Quaterniond(r.num(f[4]), r.num(f[5]), r.num(f[6]), r.num(f[7]));
        traj.push_back(e);
    }
    return traj;
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw ParseError("cannot write " + file.string());
    out << "frame,x,y,z,qw,qx,qy,qz\n";
    for (const auto& e : traj) {
        out << e.frame;
        for (int i = 0; i < 3; ++i) out << "," << format_double(e.position(i));
        out << "," << format_double(e.orientation.w()) << ","
            << format_double(e.orientation.x()) << ","
            << format_double(e.orientation.y()) << ","
            << format_double(e.orientation.z()) << "\n";
    }
}

std::vector<GpsFix> load_gps(const std::filesystem::path& file) {
    CsvReader r(file, "frame,east_m,north_m,sog_mps");
    std::vector<GpsFix> out;
    std::vector<std::string> f;
    while (r.next(&f)) {
        if (f.size() != 4) r.fail("expected 4 fields");
        out.push_back({r.integer(f[0]), r.num(f[1]), r.num(f[2]), r.num(f[3])});
    }
    return out;
}

bool seed_override(std::uint64_t* seed) {
    const char* env = std::getenv("SHOREVO_SEED");
    if (!env) return false;
    *seed = std::strtoull(env, nullptr, 10);
    return true;
}

}  // namespace shorevo
