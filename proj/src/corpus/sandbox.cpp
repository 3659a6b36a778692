// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/corpus/corpus.hpp"

#include <fstream>
#include <system_error>

namespace sentinel::corpus {

namespace fs = std::filesystem;

fs::path checked_relative(const std::string& path)
{
    const fs::path p(path);
    if (path.empty() || p.is_absolute() || p.has_root_name() || p.has_root_directory())
        throw SandboxEscape(path);
    const fs::path norm = p.lexically_normal();
    for (const auto& part : norm)
        if (part == "..")
            throw SandboxEscape(path);
    return norm;
}

SandboxHandle::SandboxHandle(fs::path root, std::vector<ResolvedPreopen> preopens)
  : root_{std::move(root)}, preopens_{std::move(preopens)}
{}

SandboxHandle::SandboxHandle(SandboxHandle&& other) noexcept
  : root_{std::move(other.root_)}, preopens_{std::move(other.preopens_)}
{
    other.root_.clear();
}

SandboxHandle& SandboxHandle::operator=(SandboxHandle&& other) noexcept
{
    if (this != &other)
    {
        cleanup();
        root_ = std::move(other.root_);
        preopens_ = std::move(other.preopens_);
        other.root_.clear();
    }
    return *this;
}

SandboxHandle::~SandboxHandle()
{
    cleanup();
}

void SandboxHandle::cleanup()
{
    if (root_.empty())
        return;
    std::error_code ec;
    fs::remove_all(root_, ec);
    root_.clear();
}

std::vector<std::string> SandboxHandle::check(const std::vector<PathAssertion>& assertions) const
{
    std::vector<std::string> failures;
    for (const auto& a : assertions)
    {
        fs::path target;
        try
        {
            target = root_ / checked_relative(a.path);
        }
        catch (const SandboxEscape& e)
        {
            failures.emplace_back(e.what());
            continue;
        }
        std::error_code ec;
        const bool exists = fs::exists(fs::symlink_status(target, ec));
        switch (a.kind)
        {
        case PathAssertion::Kind::Exists:
            if (!exists)
                failures.push_back(a.path + " should exist");
            break;
        case PathAssertion::Kind::Absent:
            if (exists)
                failures.push_back(a.path + " should be absent");
            break;
        case PathAssertion::Kind::EntryCount: {
            size_t n = 0;
            for (auto it = fs::directory_iterator(target, ec); !ec && it != fs::directory_iterator(); it.increment(ec))
                ++n;
            if (ec)
                failures.push_back(a.path + ": " + ec.message());
            else if (n != a.count)
                failures.push_back(a.path + " holds " + std::to_string(n) + " entries, expected " +
                                   std::to_string(a.count));
            break;
        }
        }
    }
    return failures;
}

SandboxHandle materialize_fixture(const TestCase& tc, const fs::path& root)
{
    // Validate every path before touching the disk.
    std::vector<fs::path> rel;
    rel.reserve(tc.fixture.tree.size());
    for (const auto& e : tc.fixture.tree)
        rel.push_back(checked_relative(e.path));
    std::vector<ResolvedPreopen> preopens;
    for (const auto& p : tc.fixture.preopens)
        preopens.push_back({checked_relative(p.host), p.guest});

    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec)
        throw IoError("cannot create sandbox " + root.string() + ": " + ec.message());
    if (!fs::is_empty(root, ec) || ec)
        throw IoError("sandbox root " + root.string() + " is not empty");
    const fs::path abs_root = fs::absolute(root).lexically_normal();
    SandboxHandle handle(abs_root, {});

    for (size_t i = 0; i < rel.size(); ++i)
    {
        const fs::path target = abs_root / rel[i];
        const auto& entry = tc.fixture.tree[i];
        if (!entry.content)
        {
            fs::create_directories(target, ec);
            if (ec)
                throw IoError("mkdir " + target.string() + ": " + ec.message());
            continue;
        }
        if (target.has_parent_path())
        {
            fs::create_directories(target.parent_path(), ec);
            if (ec)
                throw IoError("mkdir " + target.parent_path().string() + ": " + ec.message());
        }
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        out.write(entry.content->data(), static_cast<std::streamsize>(entry.content->size()));
        if (!out)
            throw IoError("write " + target.string() + " failed");
    }

    for (auto& p : preopens)
    {
        p.host = (abs_root / p.host).lexically_normal();
        if (!p.host.string().empty() && p.host.string().back() == '/')
            p.host = p.host.parent_path();
        fs::create_directories(p.host, ec);
        if (ec)
            throw IoError("mkdir " + p.host.string() + ": " + ec.message());
    }
    handle.release();
    return SandboxHandle(abs_root, std::move(preopens));
}

}  // namespace sentinel::corpus
