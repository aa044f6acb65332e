#include "romfsm/container.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace romfsm {

namespace {

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write " + path);
    }
    void raw(const void* p, std::size_t len) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
    }
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void vec(const Vec& v) { raw(v.data(), sizeof(double) * v.size()); }
    void mat(const Mat& m) { raw(m.data(), sizeof(double) * m.size()); }
    void magic(ContainerKind kind) {
        raw(kContainerMagic, sizeof kContainerMagic);
        u32(static_cast<std::uint32_t>(kind));
        u32(1);  // format version
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw std::runtime_error("cannot read " + path);
    }
    void raw(void* p, std::size_t len) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(len));
        if (in_.gcount() != static_cast<std::streamsize>(len))
            throw std::runtime_error("truncated container file: " + path_);
    }
    std::uint32_t u32() { std::uint32_t v; raw(&v, sizeof v); return v; }
    std::uint64_t u64() { std::uint64_t v; raw(&v, sizeof v); return v; }
    double f64() { double v; raw(&v, sizeof v); return v; }
    Vec vec(long n) { Vec v(n); raw(v.data(), sizeof(double) * n); return v; }
    Mat mat(long rows, long cols) {
        Mat m(rows, cols);
        raw(m.data(), sizeof(double) * rows * cols);
        return m;
    }
    void expect_magic(ContainerKind kind) {
        char magic[8];
        raw(magic, sizeof magic);
        if (std::memcmp(magic, kContainerMagic, sizeof magic) != 0)
            throw std::runtime_error("not a ROMFSM container: " + path_);
        const auto k = u32();
        if (k != static_cast<std::uint32_t>(kind))
            throw std::runtime_error("container kind mismatch in " + path_);
        const auto version = u32();
        if (version != 1) throw std::runtime_error("unsupported container version in " + path_);
    }

private:
    std::ifstream in_;
    std::string path_;
};

void write_grid_header(Writer& w, const GridMeta& grid) {
    if (const auto* g1 = std::get_if<Grid1D>(&grid)) {
        w.u32(1);
        w.u32(0);
        w.u64(static_cast<std::uint64_t>(g1->n));
        w.u64(1);
        w.f64(g1->length);
        w.f64(0.0);
    } else {
        const auto& g2 = std::get<Grid2D>(grid);
        w.u32(2);
        w.u32(0);
        w.u64(static_cast<std::uint64_t>(g2.nx));
        w.u64(static_cast<std::uint64_t>(g2.ny));
        w.f64(g2.lx);
        w.f64(g2.ly);
    }
}

GridMeta read_grid_header(Reader& r) {
    const auto rank = r.u32();
    r.u32();
    const auto nx = static_cast<long>(r.u64());
    const auto ny = static_cast<long>(r.u64());
    const double lx = r.f64();
    const double ly = r.f64();
    if (rank == 1) return Grid1D::uniform(static_cast<int>(nx), lx);
    if (rank == 2) return Grid2D::periodic(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
    throw std::runtime_error("container: unsupported field rank");
}

}  // namespace

void write_snapshots(const SnapshotSet& snaps, const std::string& path) {
    Writer w(path);
    w.magic(ContainerKind::snapshots);
    write_grid_header(w, snaps.grid);
    w.u64(static_cast<std::uint64_t>(snaps.count()));
    w.f64(snaps.snap_dt);
    w.f64(snaps.initial_time);
    w.u64(snaps.initial.size() > 0 ? 1 : 0);
    if (snaps.initial.size() > 0) w.vec(snaps.initial);
    for (long k = 0; k < snaps.count(); ++k) w.vec(snaps.data.col(k));
}

SnapshotSet read_snapshots(const std::string& path) {
    Reader r(path);
    r.expect_magic(ContainerKind::snapshots);
    SnapshotSet out;
    out.grid = read_grid_header(r);
    const long n = out.field_size();
    const long count = static_cast<long>(r.u64());
    out.snap_dt = r.f64();
    out.initial_time = r.f64();
    const bool has_initial = r.u64() != 0;
    if (has_initial) out.initial = r.vec(n);
    out.data.resize(n, count);
    out.times.resize(count);
    for (long k = 0; k < count; ++k) {
        out.data.col(k) = r.vec(n);
        out.times(k) = out.initial_time + (k + 1) * out.snap_dt;
    }
    out.validate();
    return out;
}

void write_snapshots_csv(const SnapshotSet& snaps, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[32];
    if (snaps.rank() == 2) {
        const auto& g = std::get<Grid2D>(snaps.grid);
        out << "# nx=" << g.nx << " ny=" << g.ny << " (row-major)\n";
    }
    out << "# one column per snapshot, one row per node; first column t=initial\n";
    const long n = snaps.field_size();
    for (long i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", snaps.initial.size() ? snaps.initial(i) : 0.0);
        out << buf;
        for (long k = 0; k < snaps.count(); ++k) {
            std::snprintf(buf, sizeof buf, ",%.17g", snaps.data(i, k));
            out << buf;
        }
        out << "\n";
    }
}

void write_basis(const PodBasis& basis, const std::string& path) {
    Writer w(path);
    w.magic(ContainerKind::basis);
    write_grid_header(w, basis.grid);
    w.u64(static_cast<std::uint64_t>(basis.r));
    w.u64(static_cast<std::uint64_t>(basis.singular_values.size()));
    w.u64(basis.has_companions() ? 1 : 0);
    w.u64(basis.source_hash);
    w.vec(basis.mean);
    w.mat(basis.modes);
    w.vec(basis.singular_values);
    if (basis.has_companions()) {
        w.vec(*basis.companion_mean);
        w.mat(*basis.companion_modes);
    }
}

PodBasis read_basis(const std::string& path) {
    Reader r(path);
    r.expect_magic(ContainerKind::basis);
    PodBasis out;
    out.grid = read_grid_header(r);
    const long n = out.field_size();
    out.r = static_cast<int>(r.u64());
    const long num_sigma = static_cast<long>(r.u64());
    const bool has_companions = r.u64() != 0;
    out.source_hash = r.u64();
    out.mean = r.vec(n);
    out.modes = r.mat(n, out.r);
    out.singular_values = r.vec(num_sigma);
    if (has_companions) {
        out.companion_mean = r.vec(n);
        out.companion_modes = r.mat(n, out.r);
    }
    return out;
}

void write_operators(const GromModel& model, const std::string& path) {
    model.validate();
    Writer w(path);
    w.magic(ContainerKind::operators);
    w.u64(static_cast<std::uint64_t>(model.r));
    w.f64(model.nu);
    w.u64(model.basis_hash);
    w.u64(model.grid_hash);
    w.vec(model.b);
    w.mat(model.l);
    for (int i = 0; i < model.r; ++i)
        for (int j = 0; j < model.r; ++j)
            for (int k = 0; k < model.r; ++k) w.f64(model.n3[k](i, j));
    w.vec(model.b_hat);
    w.mat(model.l_hat);
}

GromModel read_operators(const std::string& path) {
    Reader r(path);
    r.expect_magic(ContainerKind::operators);
    GromModel out;
    out.r = static_cast<int>(r.u64());
    out.nu = r.f64();
    out.basis_hash = r.u64();
    out.grid_hash = r.u64();
    out.b = r.vec(out.r);
    out.l = r.mat(out.r, out.r);
    out.n3.assign(out.r, Mat(out.r, out.r));
    for (int i = 0; i < out.r; ++i)
        for (int j = 0; j < out.r; ++j)
            for (int k = 0; k < out.r; ++k) out.n3[k](i, j) = r.f64();
    out.b_hat = r.vec(out.r);
    out.l_hat = r.mat(out.r, out.r);
    out.validate();
    return out;
}

void write_observations(const ObservationSet& obs, const std::string& path) {
    Writer w(path);
    w.magic(ContainerKind::observations);
    w.u64(static_cast<std::uint64_t>(obs.times.size()));
    w.u64(static_cast<std::uint64_t>(obs.m()));
    w.f64(obs.sigma);
    w.u64(obs.seed);
    w.u32(obs.space == ObservationSet::Space::field ? 0 : 1);
    w.u32(obs.layout.kind == SensorLayout::Kind::full ? 0 : 1);
    for (int idx : obs.layout.indices) w.u64(static_cast<std::uint64_t>(idx));
    w.vec(obs.times);
    w.mat(obs.values);
}

ObservationSet read_observations(const std::string& path) {
    Reader r(path);
    r.expect_magic(ContainerKind::observations);
    ObservationSet out;
    const long nt = static_cast<long>(r.u64());
    const long m = static_cast<long>(r.u64());
    out.sigma = r.f64();
    out.seed = r.u64();
    out.space = r.u32() == 0 ? ObservationSet::Space::field : ObservationSet::Space::coefficient;
    out.layout.kind = r.u32() == 0 ? SensorLayout::Kind::full : SensorLayout::Kind::sparse;
    out.layout.indices.resize(m);
    for (long s = 0; s < m; ++s) out.layout.indices[s] = static_cast<int>(r.u64());
    out.times = r.vec(nt);
    out.values = r.mat(m, nt);
    return out;
}

}  // namespace romfsm
