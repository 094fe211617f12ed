#include "tossfuse/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tossfuse {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw InvalidInput("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw InvalidInput("cannot open for reading: " + path.string());
    return in;
}

template <typename T>
void write_raw(std::ofstream& out, const T* data, std::size_t count) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(sizeof(T) * count));
}

template <typename T>
void read_raw(std::ifstream& in, T* data, std::size_t count, const char* what) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(sizeof(T) * count));
    if (!in) throw InvalidInput(std::string("truncated file while reading ") + what);
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
    auto out = open_out(path, false);
    for (const Vec3& v : mesh.vertices)
        out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' '
            << format_double(v.z()) << '\n';
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

TriangleMesh load_obj(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    TriangleMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 v;
            ss >> v.x() >> v.y() >> v.z();
            if (!ss) throw InvalidInput("malformed OBJ vertex in " + path.string());
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::array<std::uint32_t, 3> f{};
            for (int i = 0; i < 3; ++i) {
                std::string item;
                ss >> item;
                if (item.empty()) throw InvalidInput("malformed OBJ face in " + path.string());
                // Tolerate v/vt/vn syntax; only the vertex index is used.
                const std::size_t slash = item.find('/');
                const long idx = std::stol(item.substr(0, slash));
                if (idx < 1) throw InvalidInput("OBJ face index out of range in " + path.string());
                f[i] = static_cast<std::uint32_t>(idx - 1);
            }
            mesh.faces.push_back(f);
        }
    }
    for (const auto& f : mesh.faces)
        for (auto idx : f)
            if (idx >= mesh.vertices.size())
                throw InvalidInput("OBJ face references missing vertex in " + path.string());
    return mesh;
}

void save_ply(const std::filesystem::path& path, const PointCloud& cloud) {
    auto out = open_out(path, false);
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    for (const Vec3& p : cloud)
        out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
            << format_double(p.z()) << '\n';
}

void save_depth(const std::filesystem::path& path, const DepthMap& depth) {
    auto out = open_out(path, true);
    out.write("DPT1", 4);
    const std::uint32_t dims[2] = {static_cast<std::uint32_t>(depth.rows),
                                   static_cast<std::uint32_t>(depth.cols)};
    write_raw(out, dims, 2);
    write_raw(out, depth.data.data(), depth.data.size());
}

DepthMap load_depth(const std::filesystem::path& path) {
    auto in = open_in(path, true);
    char magic[4];
    read_raw(in, magic, 4, "depth magic");
    if (std::memcmp(magic, "DPT1", 4) != 0)
        throw InvalidInput("bad depth magic in " + path.string());
    std::uint32_t dims[2];
    read_raw(in, dims, 2, "depth dims");
    DepthMap depth(static_cast<int>(dims[0]), static_cast<int>(dims[1]));
    read_raw(in, depth.data.data(), depth.data.size(), "depth data");
    return depth;
}

void save_mask(const std::filesystem::path& path, const Mask& mask) {
    auto out = open_out(path, true);
    out << "P5\n" << mask.cols << ' ' << mask.rows << "\n255\n";
    std::vector<std::uint8_t> bytes(mask.data.size());
    for (std::size_t i = 0; i < mask.data.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
    write_raw(out, bytes.data(), bytes.size());
}

Mask load_mask(const std::filesystem::path& path) {
    auto in = open_in(path, true);
    std::string magic;
    int cols = 0, rows = 0, maxval = 0;
    in >> magic >> cols >> rows >> maxval;
    if (magic != "P5" || maxval != 255 || cols <= 0 || rows <= 0)
        throw InvalidInput("bad PGM header in " + path.string());
    in.get();  // single whitespace after maxval
    Mask mask(rows, cols);
    std::vector<std::uint8_t> bytes(mask.data.size());
    read_raw(in, bytes.data(), bytes.size(), "mask data");
    for (std::size_t i = 0; i < bytes.size(); ++i) mask.data[i] = bytes[i] >= 128;
    return mask;
}

void save_sdf(const std::filesystem::path& path, const SdfGrid& grid) {
    auto out = open_out(path, true);
    out.write("SDF1", 4);
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(grid.dims[0]),
                                   static_cast<std::uint32_t>(grid.dims[1]),
                                   static_cast<std::uint32_t>(grid.dims[2])};
    write_raw(out, dims, 3);
    const float header[5] = {static_cast<float>(grid.origin.x()),
                             static_cast<float>(grid.origin.y()),
                             static_cast<float>(grid.origin.z()),
                             static_cast<float>(grid.voxel_size),
                             static_cast<float>(grid.truncation)};
    write_raw(out, header, 5);
    write_raw(out, grid.values.data(), grid.values.size());
    write_raw(out, grid.weights.data(), grid.weights.size());
}

SdfGrid load_sdf(const std::filesystem::path& path) {
    auto in = open_in(path, true);
    char magic[4];
    read_raw(in, magic, 4, "sdf magic");
    if (std::memcmp(magic, "SDF1", 4) != 0) throw InvalidInput("bad SDF magic in " + path.string());
    std::uint32_t dims[3];
    read_raw(in, dims, 3, "sdf dims");
    float header[5];
    read_raw(in, header, 5, "sdf header");
    SdfGrid grid = SdfGrid::create(Vec3(header[0], header[1], header[2]), header[3],
                                   {static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                                    static_cast<int>(dims[2])},
                                   header[4]);
    read_raw(in, grid.values.data(), grid.values.size(), "sdf values");
    read_raw(in, grid.weights.data(), grid.weights.size(), "sdf weights");
    return grid;
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    if (!traj.rms.empty() && traj.rms.size() != traj.poses.size())
        throw InvalidInput("save_trajectory: rms/pose count mismatch");
    auto out = open_out(path, false);
    out << "frame,qw,qx,qy,qz,tx,ty,tz,rms\n";
    for (std::size_t i = 0; i < traj.poses.size(); ++i) {
        const RigidPose& p = traj.poses[i];
        const double rms = traj.rms.empty() ? 0.0 : traj.rms[i];
        out << i << ',' << format_double(p.rotation.w()) << ',' << format_double(p.rotation.x())
            << ',' << format_double(p.rotation.y()) << ',' << format_double(p.rotation.z()) << ','
            << format_double(p.translation.x()) << ',' << format_double(p.translation.y()) << ','
            << format_double(p.translation.z()) << ',' << format_double(rms) << '\n';
    }
}

Trajectory load_trajectory(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    std::string line;
    if (!std::getline(in, line) || line.rfind("frame,", 0) != 0)
        throw InvalidInput("bad trajectory header in " + path.string());
    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::size_t frame;
        double qw, qx, qy, qz, tx, ty, tz, rms;
        ss >> frame >> qw >> qx >> qy >> qz >> tx >> ty >> tz >> rms;
        if (!ss) throw InvalidInput("malformed trajectory row in " + path.string());
        RigidPose pose;
        pose.rotation = Quat(qw, qx, qy, qz).normalized();
        pose.translation = Vec3(tx, ty, tz);
        traj.poses.push_back(pose);
        traj.rms.push_back(rms);
    }
    return traj;
}

void save_model(const std::filesystem::path& path, const ContactModel& model) {
    auto out = open_out(path, false);
    out << "mass " << format_double(model.mass) << '\n';
    out << "mu " << format_double(model.mu) << '\n';
    out << "inertia";
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out << ' ' << format_double(model.inertia(r, c));
    out << '\n';
    out << "vertices " << model.vertices.size() << '\n';
    for (const Vec3& v : model.vertices)
        out << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z())
            << '\n';
}

ContactModel load_model(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    ContactModel model;
    std::string key;
    bool have_mass = false, have_inertia = false;
    while (in >> key) {
        if (key == "mass") {
            in >> model.mass;
            have_mass = true;
        } else if (key == "mu") {
            in >> model.mu;
        } else if (key == "inertia") {
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) in >> model.inertia(r, c);
            have_inertia = true;
        } else if (key == "vertices") {
            std::size_t n = 0;
            in >> n;
            model.vertices.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                in >> model.vertices[i].x() >> model.vertices[i].y() >> model.vertices[i].z();
        } else {
            throw InvalidInput("unknown key '" + key + "' in model file " + path.string());
        }
        if (!in) throw InvalidInput("malformed model file " + path.string());
    }
    if (!have_mass || !have_inertia)
        throw InvalidInput("model file missing mass or inertia: " + path.string());
    return model;
}

std::string file_hash(const std::filesystem::path& path) {
    auto in = open_in(path, true);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<std::uint8_t>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace tossfuse
