#include "keyfile.hpp"

#include <cstdio>
#include <fstream>

#include "serialize.hpp"

namespace stego {

namespace {
constexpr char kMagic[8] = {'S', 'T', 'G', 'K', 'E', 'Y', '0', '1'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::vector<std::uint8_t> serialize_key(const StegoKey& key) {
    std::vector<std::uint8_t> out;
    wire::put_bytes(out, reinterpret_cast<const std::uint8_t*>(kMagic), 8);
    wire::put_u32(out, kVersion);
    const FamilyParams& fp = key.f.params();
    wire::put_u64(out, fp.domain_size());
    wire::put_u64(out, fp.independence);
    wire::put_f64(out, fp.epsilon);
    wire::put_u64(out, fp.field_degree());
    wire::put_u64(out, fp.lambda);
    wire::put_u64(out, fp.sigma_size);
    const auto seed_bytes = key.f.seed().to_bytes();
    wire::put_u64(out, key.f.seed().size());
    wire::put_bytes(out, seed_bytes.data(), seed_bytes.size());
    key.code.serialize(out);
    wire::put_f64(out, key.min_entropy);
    wire::put_u64(out, key.alphabet_hash);
    wire::put_u64(out, key.sigma_size);
    return out;
}

StegoKey deserialize_key(const std::vector<std::uint8_t>& bytes) {
    const std::uint8_t* d = bytes.data();
    const std::size_t len = bytes.size();
    std::size_t off = 0;
    wire::need(len, off, 8);
    if (!std::equal(kMagic, kMagic + 8, d)) fail(Errc::bad_format, "not a key file");
    off += 8;
    if (wire::get_u32(d, len, off) != kVersion) fail(Errc::bad_format, "unsupported key version");

    const std::uint64_t m = wire::get_u64(d, len, off);
    const std::uint64_t t = wire::get_u64(d, len, off);
    const double eps = wire::get_f64(d, len, off);
    const std::uint64_t r = wire::get_u64(d, len, off);
    const std::uint64_t lambda = wire::get_u64(d, len, off);
    const std::uint64_t sigma = wire::get_u64(d, len, off);

    FamilyParams params;
    params.lambda = lambda;
    params.sigma_size = sigma;
    params.independence = t;
    params.epsilon = eps;
    if (params.domain_size() != m) fail(Errc::bad_format, "inconsistent family domain");
    if (params.field_degree() != r) fail(Errc::bad_format, "inconsistent field degree");

    const std::uint64_t seed_bits = wire::get_u64(d, len, off);
    if (seed_bits != params.seed_bits()) fail(Errc::bad_format, "inconsistent seed length");
    const std::size_t seed_bytes = static_cast<std::size_t>((seed_bits + 7) / 8);
    wire::need(len, off, seed_bytes);
    BitVec seed = BitVec::from_bytes(d + off, static_cast<std::size_t>(seed_bits));
    off += seed_bytes;

    CodeSpec code = CodeSpec::deserialize(d, len, off);
    if (code.lambda != lambda) fail(Errc::bad_format, "code and family block counts disagree");
    const double delta = wire::get_f64(d, len, off);
    const std::uint64_t alph_hash = wire::get_u64(d, len, off);
    const std::uint64_t sigma_size = wire::get_u64(d, len, off);
    if (off != len) fail(Errc::bad_format, "trailing bytes in key file");

    return StegoKey{KeyedFunction::from_seed(params, std::move(seed)), std::move(code), delta,
                    alph_hash, sigma_size};
}

void atomic_write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) fail(Errc::io_failure, "cannot open for writing: " + tmp);
        os.write(reinterpret_cast<const char*>(bytes.data()),
                 static_cast<std::streamsize>(bytes.size()));
        if (!os.good()) fail(Errc::io_failure, "write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        fail(Errc::io_failure, "rename failed: " + path);
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(Errc::io_failure, "cannot open: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void save_key_file(const StegoKey& key, const std::string& path) {
    atomic_write_file(path, serialize_key(key));
}

StegoKey load_key_file(const std::string& path) { return deserialize_key(read_file_bytes(path)); }

}  // namespace stego
