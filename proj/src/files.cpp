#include "hazardqa/files.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

#include "hazardqa/errors.hpp"

namespace hazardqa {

namespace {

std::atomic<unsigned long> g_temp_counter{0};

}  // namespace

void atomic_write_file(const std::filesystem::path& path, std::string_view contents) {
    const auto dir = path.parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) {
            throw IoFailure("cannot create directory " + dir.string() + ": " + ec.message());
        }
    }
    auto temp = path;
    temp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(g_temp_counter.fetch_add(1));

    const int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) {
        throw IoFailure("cannot create " + temp.string());
    }
    std::size_t done = 0;
    while (done < contents.size()) {
        const ssize_t n = ::write(fd, contents.data() + done, contents.size() - done);
        if (n < 0) {
            ::close(fd);
            std::filesystem::remove(temp);
            throw IoFailure("write failed for " + temp.string());
        }
        done += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
    if (std::rename(temp.c_str(), path.c_str()) != 0) {
        std::filesystem::remove(temp);
        throw IoFailure("cannot rename into " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace hazardqa
