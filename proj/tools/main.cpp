#include "tossfuse/dataset.hpp"
#include "tossfuse/io.hpp"
#include "tossfuse/learning.hpp"
#include "tossfuse/metrics.hpp"
#include "tossfuse/parallel.hpp"
#include "tossfuse/pipeline.hpp"
#include "tossfuse/synth.hpp"
#include "tossfuse/tracker.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tossfuse;

namespace {

// Output directory guard: refuses to clobber existing content and removes
// partial outputs when a command fails.
struct OutDir {
    fs::path path;
    bool created = false;

    explicit OutDir(const fs::path& p) : path(p) {
        if (fs::exists(path)) {
            if (!fs::is_directory(path)) throw InvalidInput("output path is not a directory: " + path.string());
            if (!fs::is_empty(path)) throw InvalidInput("output directory not empty: " + path.string());
        } else {
            fs::create_directories(path);
            created = true;
        }
    }

    void discard() {
        std::error_code ec;
        if (created)
            fs::remove_all(path, ec);
        else
            for (const auto& entry : fs::directory_iterator(path)) fs::remove_all(entry.path(), ec);
    }
};

json eval_to_json(const EvalReport& r) {
    return json{{"add_auc_percent", r.add_auc_percent},
                {"adds_auc_percent", r.adds_auc_percent},
                {"sr_percent", r.sr_percent},
                {"chamfer_cm", r.chamfer_cm},
                {"per_frame",
                 {{"add_m", r.add_errors},
                  {"adds_m", r.adds_errors},
                  {"rotation_deg", r.rotation_errors},
                  {"translation_m", r.translation_errors}}}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot read " + path.string());
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw InvalidInput("malformed JSON in " + path.string() + ": " + e.what());
    }
}

// All regular files under dir, sorted, except the manifest itself and timing
// logs (wall-clock times are not reproducible).
void write_manifest(const fs::path& dir, const std::string& command, const json& config) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    json artifacts = json::object();
    for (const auto& f : files) {
        const std::string rel = fs::relative(f, dir).generic_string();
        if (rel == "manifest.json" || rel == "timings.txt") continue;
        artifacts[rel] = file_hash(f);
    }
    json manifest{{"command", command},
                  {"config", config},
                  {"artifacts", artifacts},
                  {"version", kToolVersion}};
    write_json(dir / "manifest.json", manifest);
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

SynthConfig parse_synth_config(const json& j, CameraIntrinsics& K, RigidPose& cam_pose,
                               ContactModel& object) {
    SynthConfig cfg;
    cfg.seed = j.value("seed", 42ULL);
    cfg.n_tosses = j.value("n_tosses", 10);
    cfg.frames_per_clip = j.value("frames_per_clip", 100);
    cfg.fps = j.value("fps", 30.0);
    cfg.substeps = j.value("substeps", 10);
    if (j.contains("noise")) {
        const json& n = j["noise"];
        cfg.noise.depth_sigma = n.value("depth_sigma", cfg.noise.depth_sigma);
        cfg.noise.dropout_rate = n.value("dropout_rate", cfg.noise.dropout_rate);
        cfg.noise.mask_boundary_erosion =
            n.value("mask_boundary_erosion", cfg.noise.mask_boundary_erosion);
        cfg.noise.seed = n.value("seed", cfg.noise.seed);
    }
    K = default_intrinsics();
    cam_pose = default_camera_pose();
    if (j.contains("camera")) {
        const json& c = j["camera"];
        K.fx = c.value("fx", K.fx);
        K.fy = c.value("fy", K.fy);
        K.cx = c.value("cx", K.cx);
        K.cy = c.value("cy", K.cy);
        K.rows = c.value("rows", K.rows);
        K.cols = c.value("cols", K.cols);
        if (c.contains("eye") && c.contains("target")) {
            const auto e = c["eye"].get<std::vector<double>>();
            const auto t = c["target"].get<std::vector<double>>();
            if (e.size() != 3 || t.size() != 3)
                throw InvalidInput("camera eye/target must have 3 components");
            cam_pose = look_at_camera(Vec3(e[0], e[1], e[2]), Vec3(t[0], t[1], t[2]));
        }
    }
    object = default_cube_model();
    if (j.contains("object")) {
        const json& o = j["object"];
        object = make_cube_model(o.value("side", 0.06), o.value("mass", 0.1), o.value("mu", 0.3));
    }
    return cfg;
}

CycleConfig parse_cycle_config(const json& j) {
    CycleConfig cfg;
    cfg.cycles = j.value("cycles", cfg.cycles);
    if (j.contains("variant")) {
        const std::string v = j["variant"].get<std::string>();
        if (v.size() != 1) throw InvalidInput("variant must be a single letter b..g");
        cfg.variant = v[0];
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.polytope_k = j.value("polytope_k", cfg.polytope_k);
    cfg.mu_init = j.value("mu_init", cfg.mu_init);
    if (j.contains("icp")) {
        const json& i = j["icp"];
        cfg.track.icp.max_iterations = i.value("max_iterations", cfg.track.icp.max_iterations);
        cfg.track.icp.convergence_tol = i.value("convergence_tol", cfg.track.icp.convergence_tol);
        cfg.track.icp.max_correspondence_distance =
            i.value("max_correspondence_distance", cfg.track.icp.max_correspondence_distance);
        cfg.track.icp.min_correspondences =
            i.value("min_correspondences", cfg.track.icp.min_correspondences);
    }
    if (j.contains("train")) {
        const json& t = j["train"];
        cfg.train_cfg.epochs = t.value("epochs", cfg.train_cfg.epochs);
        cfg.train_cfg.step_size = t.value("step_size", cfg.train_cfg.step_size);
        cfg.train_cfg.learn_mu = t.value("learn_mu", cfg.train_cfg.learn_mu);
        cfg.train_cfg.weights.pred = t.value("w_pred", cfg.train_cfg.weights.pred);
        cfg.train_cfg.weights.comp = t.value("w_comp", cfg.train_cfg.weights.comp);
        cfg.train_cfg.weights.pen = t.value("w_pen", cfg.train_cfg.weights.pen);
        cfg.train_cfg.weights.diss = t.value("w_diss", cfg.train_cfg.weights.diss);
    }
    if (j.contains("tsdf")) {
        const json& t = j["tsdf"];
        cfg.recon.grid_dims = t.value("grid_dims", cfg.recon.grid_dims);
        cfg.recon.trunc_voxels = t.value("trunc_voxels", cfg.recon.trunc_voxels);
        cfg.recon.frame_stride = t.value("frame_stride", cfg.recon.frame_stride);
    }
    return cfg;
}

void write_stage_outputs(const fs::path& stage_dir, const StageReport& stage) {
    fs::create_directories(stage_dir);
    if (!stage.poses.empty()) {
        Trajectory traj{stage.poses, stage.rms};
        if (traj.rms.empty()) traj.rms.assign(traj.poses.size(), 0.0);
        save_trajectory(stage_dir / "trajectory.csv", traj);
    }
    if (!stage.mesh.empty()) save_obj(stage_dir / "mesh.obj", stage.mesh);
    if (stage.has_eval) write_json(stage_dir / "report.json", eval_to_json(stage.eval));
    if (!stage.depth.empty()) {
        fs::create_directories(stage_dir / "depth");
        fs::create_directories(stage_dir / "mask");
        for (std::size_t k = 0; k < stage.depth.size(); ++k) {
            save_depth(stage_dir / "depth" / ("frame_" + std::to_string(k) + ".dpt"),
                       stage.depth[k]);
            save_mask(stage_dir / "mask" / ("frame_" + std::to_string(k) + ".pgm"),
                      stage.mask[k]);
        }
    }
}

void write_cycle_report(const fs::path& out, const CycleReport& report) {
    json summary = json::array();
    std::ostringstream timings;
    for (const auto& stage : report.stages) {
        write_stage_outputs(out / ("stage_" + stage.name), stage);
        json row{{"stage", stage.name}};
        if (stage.has_eval) row["eval"] = eval_to_json(stage.eval);
        summary.push_back(row);
        timings << stage.name << ' ' << stage.seconds << "s\n";
    }
    write_json(out / "summary.json", json{{"stages", summary}});
    std::ofstream t(out / "timings.txt");
    t << timings.str();
}

const char* variant_label(char v) {
    switch (v) {
        case 'b': return "1 toss";
        case 'c': return "all tosses";
        case 'd': return "w/o cyclic pipeline";
        case 'e': return "w/o contact learning";
        case 'f': return "w/o icp refinement";
        case 'g': return "full";
        default: return "?";
    }
}

int run_command(int argc, char** argv) {
    CLI::App app{"tossfuse: toss-video geometry, pose and contact-dynamics learning"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (default: TOSSFUSE_THREADS or all)");

    std::function<void()> runner;

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic toss dataset");
    std::string synth_config, synth_out;
    synth_cmd->add_option("--config", synth_config, "JSON config (defaults used when omitted)");
    synth_cmd->add_option("--out", synth_out, "output dataset directory")->required();
    synth_cmd->callback([&] {
        runner = [&] {
            const json j = synth_config.empty() ? json::object() : load_json(synth_config);
            CameraIntrinsics K;
            RigidPose cam;
            ContactModel object;
            const SynthConfig cfg = parse_synth_config(j, K, cam, object);
            OutDir out(synth_out);
            try {
                const TossDataset ds = generate_toss_dataset(object, K, cam, cfg);
                save_dataset(out.path, ds);
                write_manifest(out.path, join_args(argc, argv),
                               json{{"config", j}, {"seed", cfg.seed}});
            } catch (...) {
                out.discard();
                throw;
            }
        };
    });

    // track
    auto* track_cmd = app.add_subcommand("track", "6-DoF pose tracking of one clip");
    std::string track_dataset, track_prior, track_out;
    int track_clip_idx = 0;
    track_cmd->add_option("--dataset", track_dataset)->required();
    track_cmd->add_option("--clip", track_clip_idx);
    track_cmd->add_option("--prior", track_prior, "shape prior mesh for model-to-frame mode");
    track_cmd->add_option("--out", track_out)->required();
    track_cmd->callback([&] {
        runner = [&] {
            const TossDataset ds = load_dataset(track_dataset);
            if (track_clip_idx < 0 || static_cast<std::size_t>(track_clip_idx) >= ds.clips.size())
                throw InvalidInput("clip index out of range");
            const Clip& clip = ds.clips[static_cast<std::size_t>(track_clip_idx)];
            TriangleMesh prior;
            if (!track_prior.empty()) prior = load_obj(track_prior);
            OutDir out(track_out);
            try {
                const TrackResult res =
                    track_clip(clip, ds.intrinsics, clip.initial_pose, TrackConfig(),
                               track_prior.empty() ? nullptr : &prior);
                save_trajectory(out.path / "trajectory.csv", Trajectory{res.poses, res.rms});
                json rep{{"frames", res.poses.size()}};
                if (!clip.gt_poses.empty() && ds.gt_model) {
                    const TriangleMesh gt_mesh = refined_geometry(*ds.gt_model);
                    rep["eval"] = eval_to_json(evaluate_trajectory(
                        res.poses, clip.gt_poses, sample_mesh_surface(gt_mesh, 512, 42)));
                }
                write_json(out.path / "report.json", rep);
                write_manifest(out.path, join_args(argc, argv),
                               json{{"dataset", track_dataset}, {"clip", track_clip_idx}});
            } catch (...) {
                out.discard();
                throw;
            }
        };
    });

    // reconstruct
    auto* recon_cmd = app.add_subcommand("reconstruct", "TSDF fusion + surface extraction");
    std::string recon_dataset, recon_traj, recon_out;
    bool recon_use_gt = false;
    recon_cmd->add_option("--dataset", recon_dataset)->required();
    recon_cmd->add_option("--trajectories", recon_traj,
                          "directory with clip_<i>/trajectory.csv or trajectory_clip_<i>.csv");
    recon_cmd->add_flag("--gt", recon_use_gt, "fuse with stored ground-truth poses");
    recon_cmd->add_option("--out", recon_out)->required();
    recon_cmd->callback([&] {
        runner = [&] {
            const TossDataset ds = load_dataset(recon_dataset);
            std::vector<const Clip*> clips;
            std::vector<std::vector<RigidPose>> poses;
            for (std::size_t c = 0; c < ds.clips.size(); ++c) {
                if (recon_use_gt) {
                    if (ds.clips[c].gt_poses.empty())
                        throw InvalidInput("dataset has no ground-truth poses");
                    clips.push_back(&ds.clips[c]);
                    poses.push_back(ds.clips[c].gt_poses);
                    continue;
                }
                const fs::path base(recon_traj);
                fs::path f = base / ("clip_" + std::to_string(c)) / "trajectory.csv";
                if (!fs::exists(f))
                    f = base / ("trajectory_clip_" + std::to_string(c) + ".csv");
                if (!fs::exists(f)) continue;
                const Trajectory t = load_trajectory(f);
                if (t.poses.size() != ds.clips[c].frames.size())
                    throw InvalidInput("trajectory length mismatch for clip " + std::to_string(c));
                clips.push_back(&ds.clips[c]);
                poses.push_back(t.poses);
            }
            if (clips.empty()) throw InvalidInput("no trajectories found");
            OutDir out(recon_out);
            try {
                auto [grid, mesh] = reconstruct(clips, poses, ds.intrinsics);
                save_obj(out.path / "mesh.obj", mesh);
                save_sdf(out.path / "grid.sdf", grid);
                json rep{{"clips_used", clips.size()}, {"vertices", mesh.vertices.size()}};
                if (ds.gt_model) {
                    rep["chamfer_cm"] =
                        100.0 * chamfer_mesh(mesh, refined_geometry(*ds.gt_model));
                }
                write_json(out.path / "report.json", rep);
                write_manifest(out.path, join_args(argc, argv),
                               json{{"dataset", recon_dataset}, {"gt", recon_use_gt}});
            } catch (...) {
                out.discard();
                throw;
            }
        };
    });

    // learn
    auto* learn_cmd = app.add_subcommand("learn", "contact-dynamics learning from a trajectory");
    std::string learn_traj, learn_prior, learn_init, learn_dataset, learn_out;
    int learn_k = 8;
    double learn_mu_init = 0.5;
    learn_cmd->add_option("--trajectory", learn_traj)->required();
    learn_cmd->add_option("--prior", learn_prior, "shape prior mesh (vertex initialization)");
    learn_cmd->add_option("--model-init", learn_init, "initial model file");
    learn_cmd->add_option("--dataset", learn_dataset, "dataset dir (camera pose, dt, inertia)")
        ->required();
    learn_cmd->add_option("--k", learn_k, "polytope vertex count");
    learn_cmd->add_option("--mu-init", learn_mu_init);
    learn_cmd->add_option("--out", learn_out)->required();
    learn_cmd->callback([&] {
        runner = [&] {
            const TossDataset ds = load_dataset(learn_dataset);
            const Trajectory traj = load_trajectory(learn_traj);

            ContactModel init;
            if (!learn_init.empty()) {
                init = load_model(learn_init);
            } else {
                if (!ds.gt_model)
                    throw InvalidInput("need --model-init or a dataset with gt_model.txt");
                init.mass = ds.gt_model->mass;
                init.inertia = ds.gt_model->inertia;
                init.mu = learn_mu_init;
            }
            if (init.vertices.empty()) {
                if (learn_prior.empty())
                    throw InvalidInput("need --prior mesh or vertices in --model-init");
                for (const Vec3& v : decimate_to_polytope(load_obj(learn_prior),
                                                          static_cast<std::size_t>(learn_k)))
                    init.vertices.push_back(v);
            }

            const RigidPose world_from_camera = invert(ds.camera_from_world);
            std::vector<RigidPose> world_poses;
            std::vector<double> times;
            for (std::size_t i = 0; i < traj.poses.size(); ++i) {
                world_poses.push_back(compose(world_from_camera, traj.poses[i]));
                times.push_back(static_cast<double>(i) * ds.dt);
            }
            OutDir out(learn_out);
            try {
                const TrainResult res = train(init, transitions_from_trajectory(world_poses, times));
                save_model(out.path / "model.txt", res.model);
                save_obj(out.path / "mesh.obj", refined_geometry(res.model));
                write_json(out.path / "report.json",
                           json{{"initial_loss", res.initial_loss},
                                {"final_loss", res.final_loss},
                                {"epochs_run", res.loss_history.size()}});
                write_manifest(out.path, join_args(argc, argv),
                               json{{"trajectory", learn_traj}, {"k", learn_k}});
            } catch (...) {
                out.discard();
                throw;
            }
        };
    });

    // rollout
    auto* roll_cmd = app.add_subcommand("rollout", "simulate the learned model forward");
    std::string roll_model, roll_init, roll_out;
    int roll_steps = 99, roll_substeps = 10;
    double roll_dt = 1.0 / 30.0;
    roll_cmd->add_option("--model", roll_model)->required();
    roll_cmd->add_option("--init", roll_init,
                         "px,py,pz,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz")->required();
    roll_cmd->add_option("--steps", roll_steps);
    roll_cmd->add_option("--dt", roll_dt);
    roll_cmd->add_option("--substeps", roll_substeps);
    roll_cmd->add_option("--out", roll_out)->required();
    roll_cmd->callback([&] {
        runner = [&] {
            const ContactModel model = load_model(roll_model);
            std::vector<double> v;
            std::stringstream ss(roll_init);
            std::string item;
            while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
            if (v.size() != 13) throw InvalidInput("--init needs 13 comma-separated numbers");
            BodyState s;
            s.position = Vec3(v[0], v[1], v[2]);
            s.orientation = Quat(v[3], v[4], v[5], v[6]).normalized();
            s.lin_vel = Vec3(v[7], v[8], v[9]);
            s.ang_vel = Vec3(v[10], v[11], v[12]);
            const auto states = rollout(model, s, roll_steps, roll_dt, roll_substeps);
            Trajectory traj;
            for (const BodyState& st : states) traj.poses.push_back(st.pose());
            traj.rms.assign(traj.poses.size(), 0.0);
            save_trajectory(roll_out, traj);
        };
    });

    // refine
    auto* refine_cmd = app.add_subcommand("refine", "reproject + ICP-refine one clip");
    std::string refine_dataset, refine_mesh, refine_traj, refine_out;
    int refine_clip = 0;
    refine_cmd->add_option("--dataset", refine_dataset)->required();
    refine_cmd->add_option("--clip", refine_clip);
    refine_cmd->add_option("--mesh", refine_mesh)->required();
    refine_cmd->add_option("--trajectory", refine_traj)->required();
    refine_cmd->add_option("--out", refine_out)->required();
    refine_cmd->callback([&] {
        runner = [&] {
            TossDataset ds = load_dataset(refine_dataset);
            if (refine_clip < 0 || static_cast<std::size_t>(refine_clip) >= ds.clips.size())
                throw InvalidInput("clip index out of range");
            Clip& clip = ds.clips[static_cast<std::size_t>(refine_clip)];
            const TriangleMesh mesh = load_obj(refine_mesh);
            const Trajectory traj = load_trajectory(refine_traj);
            if (traj.poses.size() != clip.frames.size())
                throw InvalidInput("trajectory length does not match clip");

            OutDir out(refine_out);
            try {
                std::vector<std::pair<DepthMap, Mask>> observed;
                for (const Frame& f : clip.frames) observed.emplace_back(f.depth, f.mask);
                const auto predicted = reproject_refined(mesh, traj.poses, ds.intrinsics);
                const RefinedFrames refined =
                    icp_refine_frames(observed, predicted, ds.intrinsics);

                TossDataset refined_ds;
                refined_ds.intrinsics = ds.intrinsics;
                refined_ds.camera_from_world = ds.camera_from_world;
                refined_ds.dt = ds.dt;
                refined_ds.noise = ds.noise;
                refined_ds.seed = ds.seed;
                refined_ds.gt_model = ds.gt_model;
                Clip rc;
                rc.initial_pose = clip.initial_pose;
                rc.gt_poses = clip.gt_poses;
                for (std::size_t k = 0; k < clip.frames.size(); ++k) {
                    Frame f;
                    f.depth = refined.depth[k];
                    f.mask = refined.mask[k];
                    f.timestamp = clip.frames[k].timestamp;
                    f.rgb = clip.frames[k].rgb;
                    rc.frames.push_back(std::move(f));
                }
                refined_ds.clips.push_back(std::move(rc));
                save_dataset(out.path, refined_ds);

                Trajectory corrections;
                corrections.poses = refined.corrections;
                corrections.rms.assign(refined.corrections.size(), 0.0);
                save_trajectory(out.path / "corrections.csv", corrections);
                write_manifest(out.path, join_args(argc, argv),
                               json{{"dataset", refine_dataset}, {"clip", refine_clip}});
            } catch (...) {
                out.discard();
                throw;
            }
        };
    });

    // pipeline
    auto* pipe_cmd = app.add_subcommand("pipeline", "run one ablation variant end to end");
    std::string pipe_dataset, pipe_variant = "g", pipe_config, pipe_out;
    int pipe_cycles = 1;
    pipe_cmd->add_option("--dataset", pipe_dataset)->required();
    pipe_cmd->add_option("--variant", pipe_variant)->check(CLI::IsMember({"b", "c", "d", "e", "f", "g"}));
    pipe_cmd->add_option("--cycles", pipe_cycles);
    pipe_cmd->add_option("--config", pipe_config, "pipeline.json overrides");
    pipe_cmd->add_option("--out", pipe_out)->required();
    pipe_cmd->callback([&] {
        runner = [&] {
            const TossDataset ds = load_dataset(pipe_dataset);
            const json j = pipe_config.empty() ? json::object() : load_json(pipe_config);
            CycleConfig cfg = parse_cycle_config(j);
            cfg.variant = pipe_variant[0];
            cfg.cycles = pipe_cycles;
            OutDir out(pipe_out);
            try {
                const CycleReport report = run_cycle(ds, cfg);
                write_cycle_report(out.path, report);
                write_manifest(out.path, join_args(argc, argv),
                               json{{"dataset", pipe_dataset},
                                    {"variant", pipe_variant},
                                    {"cycles", pipe_cycles},
                                    {"seed", cfg.seed}});
            } catch (...) {
                out.discard();
                throw;
            }
        };
    });

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "pose/geometry metrics");
    std::string eval_est, eval_gt, eval_geom, eval_out;
    eval_cmd->add_option("--est", eval_est)->required();
    eval_cmd->add_option("--gt", eval_gt)->required();
    eval_cmd->add_option("--geom", eval_geom, "geometry mesh for ADD/ADD-S (trajectory mode)");
    eval_cmd->add_option("--out", eval_out)->required();
    eval_cmd->callback([&] {
        runner = [&] {
            const bool est_obj = eval_est.ends_with(".obj");
            const bool gt_obj = eval_gt.ends_with(".obj");
            if (est_obj != gt_obj) throw InvalidInput("evaluate: est/gt must both be .csv or .obj");
            json rep;
            if (est_obj) {
                rep["chamfer_cm"] = 100.0 * chamfer_mesh(load_obj(eval_est), load_obj(eval_gt));
            } else {
                if (eval_geom.empty())
                    throw InvalidInput("evaluate: trajectory mode needs --geom mesh");
                const Trajectory est = load_trajectory(eval_est);
                const Trajectory gt = load_trajectory(eval_gt);
                const PointCloud geom = sample_mesh_surface(load_obj(eval_geom), 512, 42);
                rep = eval_to_json(evaluate_trajectory(est.poses, gt.poses, geom));
            }
            write_json(eval_out, rep);
        };
    });

    // ablate
    auto* ablate_cmd = app.add_subcommand("ablate", "run variants b..g and summarize");
    std::string ablate_dataset, ablate_out, ablate_config;
    int ablate_cycles = 1;
    ablate_cmd->add_option("--dataset", ablate_dataset)->required();
    ablate_cmd->add_option("--cycles", ablate_cycles);
    ablate_cmd->add_option("--config", ablate_config);
    ablate_cmd->add_option("--out", ablate_out)->required();
    ablate_cmd->callback([&] {
        runner = [&] {
            const TossDataset ds = load_dataset(ablate_dataset);
            const json j = ablate_config.empty() ? json::object() : load_json(ablate_config);
            OutDir out(ablate_out);
            try {
                json rows = json::array();
                std::printf("%-28s %9s %8s %7s %8s\n", "variant", "ADD-S(%)", "ADD(%)", "SR(%)",
                            "CD(cm)");
                for (char v = 'b'; v <= 'g'; ++v) {
                    CycleConfig cfg = parse_cycle_config(j);
                    cfg.variant = v;
                    cfg.cycles = ablate_cycles;
                    const CycleReport report = run_cycle(ds, cfg);
                    write_cycle_report(out.path / std::string(1, v), report);
                    const StageReport& fin = report.final_stage();
                    const EvalReport& e = fin.eval;
                    std::printf("%c  %-25s %9.2f %8.2f %7.2f %8.2f\n", v, variant_label(v),
                                e.adds_auc_percent, e.add_auc_percent, e.sr_percent, e.chamfer_cm);
                    rows.push_back(json{{"variant", std::string(1, v)},
                                        {"label", variant_label(v)},
                                        {"final_stage", fin.name},
                                        {"adds_auc_percent", e.adds_auc_percent},
                                        {"add_auc_percent", e.add_auc_percent},
                                        {"sr_percent", e.sr_percent},
                                        {"chamfer_cm", e.chamfer_cm}});
                }
                write_json(out.path / "summary.json", json{{"rows", rows}});
                write_manifest(out.path, join_args(argc, argv),
                               json{{"dataset", ablate_dataset}, {"cycles", ablate_cycles}});
            } catch (...) {
                out.discard();
                throw;
            }
        };
    });

    CLI11_PARSE(app, argc, argv);
    if (threads > 0) set_thread_cap(static_cast<unsigned>(threads));
    runner();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_command(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
