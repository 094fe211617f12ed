#include "tossfuse/dataset.hpp"

#include "tossfuse/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace tossfuse {

using nlohmann::json;

void NoiseConfig::validate() const {
    if (depth_sigma < 0.0 || dropout_rate < 0.0 || dropout_rate > 1.0 ||
        mask_boundary_erosion < 0)
        throw InvalidInput("NoiseConfig: fields must be non-negative (dropout in [0,1])");
}

void TossDataset::validate() const {
    intrinsics.validate();
    noise.validate();
    if (dt <= 0.0) throw InvalidInput("TossDataset: dt must be positive");
    for (std::size_t c = 0; c < clips.size(); ++c) {
        const Clip& clip = clips[c];
        if (clip.frames.empty()) throw InvalidInput("TossDataset: empty clip");
        if (clip.frames[0].mask.area() == 0)
            throw InvalidInput("TossDataset: clip frame 0 has empty mask");
        for (std::size_t k = 0; k + 1 < clip.frames.size(); ++k) {
            const double d = clip.frames[k + 1].timestamp - clip.frames[k].timestamp;
            if (d <= 0.0 || std::abs(d - dt) > 0.01 * dt)
                throw InvalidInput("TossDataset: timestamps must increase at the nominal rate");
        }
        if (!clip.gt_poses.empty() && clip.gt_poses.size() != clip.frames.size())
            throw InvalidInput("TossDataset: ground-truth pose count mismatch");
    }
}

namespace {

json pose_to_json(const RigidPose& p) {
    return json{{"qw", p.rotation.w()}, {"qx", p.rotation.x()}, {"qy", p.rotation.y()},
                {"qz", p.rotation.z()}, {"tx", p.translation.x()}, {"ty", p.translation.y()},
                {"tz", p.translation.z()}};
}

RigidPose pose_from_json(const json& j) {
    RigidPose p;
    p.rotation = Quat(j.at("qw").get<double>(), j.at("qx").get<double>(),
                      j.at("qy").get<double>(), j.at("qz").get<double>())
                     .normalized();
    p.translation = Vec3(j.at("tx").get<double>(), j.at("ty").get<double>(),
                         j.at("tz").get<double>());
    return p;
}

}  // namespace

void save_dataset(const std::filesystem::path& dir, const TossDataset& ds) {
    ds.validate();
    std::filesystem::create_directories(dir);

    json meta;
    meta["intrinsics"] = {{"fx", ds.intrinsics.fx}, {"fy", ds.intrinsics.fy},
                          {"cx", ds.intrinsics.cx}, {"cy", ds.intrinsics.cy},
                          {"rows", ds.intrinsics.rows}, {"cols", ds.intrinsics.cols}};
    meta["camera_from_world"] = pose_to_json(ds.camera_from_world);
    meta["dt"] = ds.dt;
    meta["seed"] = ds.seed;
    meta["noise"] = {{"depth_sigma", ds.noise.depth_sigma},
                     {"dropout_rate", ds.noise.dropout_rate},
                     {"mask_boundary_erosion", ds.noise.mask_boundary_erosion},
                     {"seed", ds.noise.seed}};
    meta["n_clips"] = ds.clips.size();

    json clips = json::array();
    for (std::size_t c = 0; c < ds.clips.size(); ++c) {
        const Clip& clip = ds.clips[c];
        clips.push_back({{"frames", clip.frames.size()},
                         {"t0", clip.frames.front().timestamp},
                         {"initial_pose", pose_to_json(clip.initial_pose)}});

        const auto clip_dir = dir / ("clip_" + std::to_string(c));
        std::filesystem::create_directories(clip_dir);
        for (std::size_t k = 0; k < clip.frames.size(); ++k) {
            const std::string stem = "frame_" + std::to_string(k);
            save_depth(clip_dir / (stem + ".dpt"), clip.frames[k].depth);
            save_mask(clip_dir / (stem + ".pgm"), clip.frames[k].mask);
            if (!clip.frames[k].rgb.empty()) {
                std::ofstream rgb(clip_dir / (stem + ".rgb"), std::ios::binary);
                rgb.write(reinterpret_cast<const char*>(clip.frames[k].rgb.data()),
                          static_cast<std::streamsize>(clip.frames[k].rgb.size()));
            }
        }
        if (!clip.gt_poses.empty()) {
            Trajectory gt;
            gt.poses = clip.gt_poses;
            save_trajectory(clip_dir / "gt_trajectory.csv", gt);
        }
    }
    meta["clips"] = clips;

    std::ofstream out(dir / "dataset.json");
    out << meta.dump(2) << '\n';

    if (ds.gt_model) save_model(dir / "gt_model.txt", *ds.gt_model);
}

TossDataset load_dataset(const std::filesystem::path& dir) {
    std::ifstream in(dir / "dataset.json");
    if (!in) throw InvalidInput("dataset.json not found in " + dir.string());
    json meta;
    try {
        in >> meta;
    } catch (const json::exception& e) {
        throw InvalidInput("malformed dataset.json: " + std::string(e.what()));
    }

    TossDataset ds;
    try {
        const json& k = meta.at("intrinsics");
        ds.intrinsics.fx = k.at("fx").get<double>();
        ds.intrinsics.fy = k.at("fy").get<double>();
        ds.intrinsics.cx = k.at("cx").get<double>();
        ds.intrinsics.cy = k.at("cy").get<double>();
        ds.intrinsics.rows = k.at("rows").get<int>();
        ds.intrinsics.cols = k.at("cols").get<int>();
        ds.camera_from_world = pose_from_json(meta.at("camera_from_world"));
        ds.dt = meta.at("dt").get<double>();
        ds.seed = meta.at("seed").get<std::uint64_t>();
        const json& n = meta.at("noise");
        ds.noise.depth_sigma = n.at("depth_sigma").get<double>();
        ds.noise.dropout_rate = n.at("dropout_rate").get<double>();
        ds.noise.mask_boundary_erosion = n.at("mask_boundary_erosion").get<int>();
        ds.noise.seed = n.at("seed").get<std::uint64_t>();

        const json& clips = meta.at("clips");
        for (std::size_t c = 0; c < clips.size(); ++c) {
            Clip clip;
            const std::size_t frames = clips[c].at("frames").get<std::size_t>();
            const double t0 = clips[c].at("t0").get<double>();
            clip.initial_pose = pose_from_json(clips[c].at("initial_pose"));
            const auto clip_dir = dir / ("clip_" + std::to_string(c));
            for (std::size_t k = 0; k < frames; ++k) {
                Frame f;
                const std::string stem = "frame_" + std::to_string(k);
                f.depth = load_depth(clip_dir / (stem + ".dpt"));
                f.mask = load_mask(clip_dir / (stem + ".pgm"));
                f.timestamp = t0 + static_cast<double>(k) * ds.dt;
                const auto rgb_path = clip_dir / (stem + ".rgb");
                if (std::filesystem::exists(rgb_path)) {
                    std::ifstream rgb(rgb_path, std::ios::binary);
                    f.rgb.assign(std::istreambuf_iterator<char>(rgb),
                                 std::istreambuf_iterator<char>());
                }
                clip.frames.push_back(std::move(f));
            }
            const auto gt_path = clip_dir / "gt_trajectory.csv";
            if (std::filesystem::exists(gt_path)) clip.gt_poses = load_trajectory(gt_path).poses;
            ds.clips.push_back(std::move(clip));
        }
    } catch (const json::exception& e) {
        throw InvalidInput("dataset.json missing fields: " + std::string(e.what()));
    }

    if (std::filesystem::exists(dir / "gt_model.txt"))
        ds.gt_model = load_model(dir / "gt_model.txt");

    ds.validate();
    return ds;
}

}  // namespace tossfuse
