#include "robsim/field_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace robsim {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void put_le_double(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_le_double(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw ParseError("truncated ROBFIELD payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

std::string token_value(const std::string& header, const std::string& key, int lineno) {
    auto pos = header.find(" " + key + "=");
    if (pos == std::string::npos)
        throw ParseError("ROBFIELD header missing " + key, lineno);
    pos += key.size() + 2;
    auto end = header.find(' ', pos);
    return header.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

} // namespace

void write_record(std::ostream& os, const FieldRecord& rec) {
    os << "ROBFIELD v1 name=" << rec.name << " nx=" << rec.nx << " ny=" << rec.ny
       << " nz=" << rec.nz << " time=" << format_double(rec.time) << "\n";
    for (double v : rec.values) put_le_double(os, v);
}

bool peek_record(std::istream& is) {
    return is.good() && is.peek() != std::char_traits<char>::eof();
}

FieldRecord read_record(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw ParseError("missing ROBFIELD header");
    if (header.rfind("ROBFIELD v1 ", 0) != 0)
        throw ParseError("not a ROBFIELD v1 header: " + header.substr(0, 32));
    FieldRecord rec;
    rec.name = token_value(header, "name", 0);
    rec.nx = std::stoi(token_value(header, "nx", 0));
    rec.ny = std::stoi(token_value(header, "ny", 0));
    rec.nz = std::stoi(token_value(header, "nz", 0));
    rec.time = std::stod(token_value(header, "time", 0));
    if (rec.nx <= 0 || rec.ny <= 0 || rec.nz <= 0)
        throw ParseError("invalid ROBFIELD dimensions");
    rec.values.resize(std::size_t(rec.nx) * rec.ny * rec.nz);
    for (double& v : rec.values) v = get_le_double(is);
    return rec;
}

void write_velocity_snapshot(const std::string& path, const VelocityField& v, double time) {
    const DomainSpec& d = v.domain();
    std::ostringstream os(std::ios::binary);
    write_record(os, {"u1", d.nx + 1, d.ny, 1, time, v.u1_data()});
    write_record(os, {"u2", d.nx, d.ny + 1, 1, time, v.u2_data()});
    atomic_write_file(path, os.str());
}

std::pair<VelocityField, double> read_velocity_snapshot(const std::string& path,
                                                        const DomainSpec& dom) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    FieldRecord r1 = read_record(is);
    FieldRecord r2 = read_record(is);
    if (r1.nx != dom.nx + 1 || r1.ny != dom.ny || r2.nx != dom.nx || r2.ny != dom.ny + 1)
        throw SpecMismatch("velocity snapshot dimensions do not match grid: " + path);
    VelocityField v(dom);
    v.u1_data() = std::move(r1.values);
    v.u2_data() = std::move(r2.values);
    return {std::move(v), r1.time};
}

void write_scalar_snapshot(const std::string& path, const ScalarField3D& f, double time) {
    const DomainSpec& d = f.domain();
    std::ostringstream os(std::ios::binary);
    write_record(os, {f.name(), d.nx, d.ny, d.nz, time, f.data()});
    atomic_write_file(path, os.str());
}

std::pair<ScalarField3D, double> read_scalar_snapshot(const std::string& path,
                                                      const DomainSpec& dom) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    FieldRecord r = read_record(is);
    if (r.nx != dom.nx || r.ny != dom.ny || r.nz != dom.nz)
        throw SpecMismatch("scalar snapshot dimensions do not match grid: " + path);
    ScalarField3D f(dom, r.name);
    f.data() = std::move(r.values);
    return {std::move(f), r.time};
}

void atomic_write_file(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp + " for writing");
        os.write(contents.data(), std::streamsize(contents.size()));
        if (!os) throw IoError("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot rename " + tmp + " to " + path);
}

} // namespace robsim
