#include <ransomtrace/address_codec.hpp>

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <stdexcept>

namespace ransomtrace::codec {
namespace {

constexpr std::string_view kBase58Alphabet =
    "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

constexpr std::string_view kBech32Charset = "qpzry9x8gf2tvdw0s3jn54khce6mua7l";

constexpr std::uint32_t kBech32Const = 1;
constexpr std::uint32_t kBech32mConst = 0x2bc830a3;

int base58_digit(char c) noexcept
{
    auto pos = kBase58Alphabet.find(c);
    return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

std::uint32_t bech32_polymod(std::span<const std::uint8_t> values) noexcept
{
    constexpr std::array<std::uint32_t, 5> gen{0x3b6a57b2, 0x26508e6d, 0x1ea119fa, 0x3d4233dd, 0x2a1462b3};
    std::uint32_t chk = 1;
    for (auto v : values) {
        const std::uint32_t top = chk >> 25;
        chk = ((chk & 0x1ffffff) << 5) ^ v;
        for (int i = 0; i < 5; ++i)
            if ((top >> i) & 1) chk ^= gen[i];
    }
    return chk;
}

std::vector<std::uint8_t> hrp_expand(std::string_view hrp)
{
    std::vector<std::uint8_t> out;
    out.reserve(hrp.size() * 2 + 1);
    for (char c : hrp) out.push_back(static_cast<std::uint8_t>(c) >> 5);
    out.push_back(0);
    for (char c : hrp) out.push_back(static_cast<std::uint8_t>(c) & 31);
    return out;
}

// Regroups bits; returns false on invalid padding when !pad.
bool convert_bits(std::span<const std::uint8_t> in, int from, int to, bool pad,
                  std::vector<std::uint8_t>& out)
{
    std::uint32_t acc = 0;
    int bits = 0;
    const std::uint32_t maxv = (1u << to) - 1;
    for (auto v : in) {
        if (v >> from) return false;
        acc = (acc << from) | v;
        bits += from;
        while (bits >= to) {
            bits -= to;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & maxv));
        }
    }
    if (pad) {
        if (bits) out.push_back(static_cast<std::uint8_t>((acc << (to - bits)) & maxv));
    } else if (bits >= from || ((acc << (to - bits)) & maxv)) {
        return false;
    }
    return true;
}

std::string bech32_encode(std::string_view hrp, std::span<const std::uint8_t> data, std::uint32_t constant)
{
    auto values = hrp_expand(hrp);
    values.insert(values.end(), data.begin(), data.end());
    values.insert(values.end(), 6, 0);
    const std::uint32_t mod = bech32_polymod(values) ^ constant;
    std::string out(hrp);
    out += '1';
    for (auto d : data) out += kBech32Charset[d];
    for (int i = 0; i < 6; ++i) out += kBech32Charset[(mod >> (5 * (5 - i))) & 31];
    return out;
}

} // namespace

std::string_view to_string(Errc e) noexcept
{
    switch (e) {
    case Errc::InvalidCharacter: return "InvalidCharacter";
    case Errc::BadChecksum: return "BadChecksum";
    case Errc::BadLength: return "BadLength";
    case Errc::UnknownVersion: return "UnknownVersion";
    case Errc::MixedCase: return "MixedCase";
    case Errc::UnknownHrp: return "UnknownHrp";
    case Errc::BadProgramLength: return "BadProgramLength";
    case Errc::UnsupportedWitnessVersion: break;
    }
    return "UnsupportedWitnessVersion";
}

std::vector<std::uint8_t> double_sha256(std::span<const std::uint8_t> data)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> first{};
    std::array<unsigned char, EVP_MAX_MD_SIZE> second{};
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), first.data(), &len, EVP_sha256(), nullptr)
        || !EVP_Digest(first.data(), len, second.data(), &len, EVP_sha256(), nullptr))
        throw std::runtime_error("SHA-256 digest failed");
    return {second.begin(), second.begin() + len};
}

std::string base58_encode(std::span<const std::uint8_t> data)
{
    std::size_t zeros = 0;
    while (zeros < data.size() && data[zeros] == 0) ++zeros;

    // Big-endian base-58 digits, built by repeated multiply-add.
    std::vector<std::uint8_t> digits;
    digits.reserve(data.size() * 138 / 100 + 1);
    for (std::size_t i = zeros; i < data.size(); ++i) {
        std::uint32_t carry = data[i];
        for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
            carry += static_cast<std::uint32_t>(*it) << 8;
            *it = static_cast<std::uint8_t>(carry % 58);
            carry /= 58;
        }
        while (carry) {
            digits.insert(digits.begin(), static_cast<std::uint8_t>(carry % 58));
            carry /= 58;
        }
    }
    std::string out(zeros, '1');
    for (auto d : digits) out += kBase58Alphabet[d];
    return out;
}

std::vector<std::uint8_t> base58_decode(std::string_view s)
{
    std::size_t ones = 0;
    while (ones < s.size() && s[ones] == '1') ++ones;

    std::vector<std::uint8_t> bytes;
    bytes.reserve(s.size() * 733 / 1000 + 1);
    for (std::size_t i = ones; i < s.size(); ++i) {
        const int digit = base58_digit(s[i]);
        if (digit < 0)
            throw CodecError(Errc::InvalidCharacter,
                             "invalid base58 character at position " + std::to_string(i));
        std::uint32_t carry = static_cast<std::uint32_t>(digit);
        for (auto it = bytes.rbegin(); it != bytes.rend(); ++it) {
            carry += static_cast<std::uint32_t>(*it) * 58;
            *it = static_cast<std::uint8_t>(carry & 0xff);
            carry >>= 8;
        }
        while (carry) {
            bytes.insert(bytes.begin(), static_cast<std::uint8_t>(carry & 0xff));
            carry >>= 8;
        }
    }
    std::vector<std::uint8_t> out(ones, 0);
    out.insert(out.end(), bytes.begin(), bytes.end());
    return out;
}

std::string base58check_encode(std::uint8_t version, std::span<const std::uint8_t> payload)
{
    std::vector<std::uint8_t> buf;
    buf.reserve(payload.size() + 5);
    buf.push_back(version);
    buf.insert(buf.end(), payload.begin(), payload.end());
    const auto check = double_sha256(buf);
    buf.insert(buf.end(), check.begin(), check.begin() + 4);
    return base58_encode(buf);
}

DecodedAddress decode_base58check(std::string_view s)
{
    if (s.empty() || s.size() > 64)
        throw CodecError(Errc::BadLength, "base58check string length out of range");
    const auto raw = base58_decode(s);
    if (raw.size() < 5)
        throw CodecError(Errc::BadLength, "base58check payload too short");

    const std::span<const std::uint8_t> body(raw.data(), raw.size() - 4);
    const auto check = double_sha256(body);
    if (!std::equal(check.begin(), check.begin() + 4, raw.end() - 4))
        throw CodecError(Errc::BadChecksum, "base58check checksum mismatch");
    if (body.size() != 21)
        throw CodecError(Errc::BadLength,
                         "expected 20-byte hash, got " + std::to_string(body.size() - 1) + " bytes");

    DecodedAddress out;
    out.version = body[0];
    out.payload.assign(body.begin() + 1, body.end());
    if (out.version == kP2pkhVersion)
        out.script_type = ScriptType::P2PKH;
    else if (out.version == kP2shVersion)
        out.script_type = ScriptType::P2SH;
    else
        throw CodecError(Errc::UnknownVersion,
                         "non-mainnet version byte " + std::to_string(out.version));
    return out;
}

DecodedAddress decode_bech32(std::string_view s)
{
    if (s.size() < 8 || s.size() > 90)
        throw CodecError(Errc::BadLength, "bech32 string length out of range");

    bool lower = false, upper = false;
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 33 || u > 126)
            throw CodecError(Errc::InvalidCharacter, "bech32 character out of range");
        lower |= (c >= 'a' && c <= 'z');
        upper |= (c >= 'A' && c <= 'Z');
    }
    if (lower && upper)
        throw CodecError(Errc::MixedCase, "bech32 string mixes upper and lower case");

    const std::string str = ascii_lower(s);
    const auto sep = str.rfind('1');
    if (sep == std::string::npos || sep == 0 || sep + 7 > str.size())
        throw CodecError(Errc::BadLength, "bech32 separator misplaced");

    const std::string hrp = str.substr(0, sep);
    std::vector<std::uint8_t> data;
    for (std::size_t i = sep + 1; i < str.size(); ++i) {
        auto pos = kBech32Charset.find(str[i]);
        if (pos == std::string_view::npos)
            throw CodecError(Errc::InvalidCharacter,
                             "invalid bech32 character at position " + std::to_string(i));
        data.push_back(static_cast<std::uint8_t>(pos));
    }

    auto values = hrp_expand(hrp);
    values.insert(values.end(), data.begin(), data.end());
    const std::uint32_t residue = bech32_polymod(values);
    if (residue != kBech32Const && residue != kBech32mConst)
        throw CodecError(Errc::BadChecksum, "bech32 checksum mismatch");
    if (hrp != kMainnetHrp)
        throw CodecError(Errc::UnknownHrp, "human-readable part '" + hrp + "' is not mainnet");

    data.resize(data.size() - 6);
    if (data.empty())
        throw CodecError(Errc::BadProgramLength, "empty witness data");
    const std::uint8_t witver = data[0];
    if (witver > 16)
        throw CodecError(Errc::UnsupportedWitnessVersion, "witness version above 16");

    std::vector<std::uint8_t> program;
    if (!convert_bits(std::span(data).subspan(1), 5, 8, false, program))
        throw CodecError(Errc::BadProgramLength, "invalid witness program padding");
    if (program.size() < 2 || program.size() > 40)
        throw CodecError(Errc::BadProgramLength, "witness program length out of range");

    const std::uint32_t expected = witver == 0 ? kBech32Const : kBech32mConst;
    if (residue != expected)
        throw CodecError(Errc::BadChecksum, "checksum variant does not match witness version");
    if (witver != 0)
        throw CodecError(Errc::UnsupportedWitnessVersion,
                         "witness version " + std::to_string(witver) + " not tracked");

    DecodedAddress out;
    out.version = witver;
    out.hrp = hrp;
    if (program.size() == 20)
        out.script_type = ScriptType::P2WPKH;
    else if (program.size() == 32)
        out.script_type = ScriptType::P2WSH;
    else
        throw CodecError(Errc::BadProgramLength,
                         "v0 program must be 20 or 32 bytes, got " + std::to_string(program.size()));
    out.payload = std::move(program);
    return out;
}

std::string encode_segwit(std::string_view hrp, std::uint8_t witness_version,
                          std::span<const std::uint8_t> program)
{
    std::vector<std::uint8_t> data{witness_version};
    convert_bits(program, 8, 5, true, data);
    return bech32_encode(hrp, data, witness_version == 0 ? kBech32Const : kBech32mConst);
}

ScriptType classify(std::string_view s) noexcept
{
    try {
        const bool segwit = s.size() > 3 && ascii_lower(s.substr(0, 3)) == "bc1";
        return segwit ? decode_bech32(s).script_type : decode_base58check(s).script_type;
    } catch (...) {
        return ScriptType::Unknown;
    }
}

std::string encode(const DecodedAddress& addr)
{
    if (addr.hrp.empty())
        return base58check_encode(addr.version, addr.payload);
    return encode_segwit(addr.hrp, addr.version, addr.payload);
}

} // namespace ransomtrace::codec
