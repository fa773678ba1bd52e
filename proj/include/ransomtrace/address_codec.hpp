#pragma once

// Bitcoin mainnet address parsing: Base58Check (P2PKH/P2SH) and Bech32
// SegWit v0 (P2WPKH/P2WSH). Every decode verifies the checksum; prefix
// sniffing alone is never trusted.

#include <ransomtrace/chain_model.hpp>
#include <ransomtrace/error.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ransomtrace::codec {

enum class Errc {
    InvalidCharacter,
    BadChecksum,
    BadLength,
    UnknownVersion,   // well-formed Base58Check with a non-mainnet version byte
    MixedCase,
    UnknownHrp,
    BadProgramLength,
    UnsupportedWitnessVersion,
};

std::string_view to_string(Errc e) noexcept;

class CodecError : public Error {
public:
    CodecError(Errc code, const std::string& message)
        : Error(std::string(to_string(code)), message), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

struct DecodedAddress {
    // Legacy: version byte (0x00 / 0x05). Bech32: witness version.
    std::uint8_t version = 0;
    // "bc" for SegWit addresses, empty for legacy.
    std::string hrp;
    std::vector<std::uint8_t> payload;
    ScriptType script_type = ScriptType::Unknown;
};

inline constexpr std::uint8_t kP2pkhVersion = 0x00;
inline constexpr std::uint8_t kP2shVersion = 0x05;
inline constexpr std::string_view kMainnetHrp = "bc";

// Raw Base58 (no checksum). Leading '1's map to leading zero bytes.
std::string base58_encode(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> base58_decode(std::string_view s);

// Version byte + payload + 4-byte double-SHA256 checksum.
std::string base58check_encode(std::uint8_t version, std::span<const std::uint8_t> payload);

DecodedAddress decode_base58check(std::string_view s);
DecodedAddress decode_bech32(std::string_view s);

// Lowercase SegWit address for a witness program.
std::string encode_segwit(std::string_view hrp, std::uint8_t witness_version,
                          std::span<const std::uint8_t> program);

// Full decode; Unknown on any failure.
ScriptType classify(std::string_view s) noexcept;

// Canonical re-encoding of a decoded address (lowercase for SegWit).
std::string encode(const DecodedAddress& addr);

std::vector<std::uint8_t> double_sha256(std::span<const std::uint8_t> data);

} // namespace ransomtrace::codec
