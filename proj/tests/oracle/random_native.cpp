#include "random_native.hpp"

#include <random>
#include <sstream>
#include <vector>

namespace oracle {

namespace {

const char *const kStrings[] = {"alpha", "beta", "com/r/Main", "com/r/Other", "()V", "(I)V", "()Ljava/lang/Object;", "a"};

class Gen
{
public:
    explicit Gen(std::uint32_t seed) : rng_(seed) {}

    std::string module(std::uint32_t seed)
    {
        std::ostringstream os;
        os << "module \"rand" << seed << "\" {\n";
        os << "    string @n0 = \"alpha\"\n    string @s0 = \"()V\"\n\n";
        os << "    table names {\n        (\"alpha\", \"()V\")\n        (\"beta\", ?)\n        (@n0, @s0)\n    }\n\n";
        std::size_t helpers = pick(3);
        for (std::size_t h = 0; h < helpers; ++h)
            os << function("h" + std::to_string(h), false, h, 2) << "\n";
        os << function("root", true, helpers, 5);
        os << "}\n";
        return os.str();
    }

private:
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    const std::string &any(const std::vector<std::string> &v) { return v[pick(v.size())]; }

    std::string function(const std::string &name, bool exported, std::size_t callable, std::size_t max_branches)
    {
        std::vector<std::string> regs = {"self", "x", "s"};
        std::vector<std::string> lines;
        std::vector<std::string> pending;
        std::size_t branches = 0, calls = 0, label_no = 0;
        std::size_t length = 6 + pick(14);
        auto fresh = [&] {
            std::string r = "r" + std::to_string(regs.size());
            return r;
        };
        for (std::size_t i = 0; i < length; ++i)
        {
            if (!pending.empty() && pick(3) == 0)
            {
                lines.push_back("L" + pending.back() + ":");
                pending.pop_back();
            }
            std::string dst = fresh();
            bool defines = true;
            std::string line;
            switch (pick(15))
            {
            case 0:
            case 1: line = "const-str \"" + std::string(kStrings[pick(std::size(kStrings))]) + "\""; break;
            case 2: line = "const-int " + std::to_string(pick(4)); break;
            case 3: line = "concat " + any(regs) + ", " + any(regs); break;
            case 4: line = "add " + any(regs) + ", " + std::to_string(pick(3)); break;
            case 5: line = "load-table-entry &names, " + (pick(2) ? any(regs) : std::to_string(pick(3))) + ", " +
                           std::to_string(pick(2));
                break;
            case 6:
                defines = false;
                line = "store-table-entry &names, " + std::to_string(pick(3)) + ", " + std::to_string(pick(2)) + ", " +
                       any(regs);
                break;
            case 7: line = pick(2) ? "FindClass(env, " + any(regs) + ")" : "GetObjectClass(env, self)"; break;
            case 8:
                line = std::string(pick(2) ? "GetMethodID" : "GetStaticMethodID") + "(env, " + any(regs) + ", " +
                       any(regs) + ", " + any(regs) + ")";
                break;
            case 9:
            case 10: {
                static const char *const calls_[] = {"CallVoidMethod", "CallObjectMethod", "CallIntMethod",
                                                     "CallStaticVoidMethod", "CallStaticObjectMethod"};
                std::string c = calls_[pick(std::size(calls_))];
                defines = c.find("Void") == std::string::npos;
                line = c + "(env, " + any(regs) + ", " + any(regs) + (pick(2) ? ", " + any(regs) : "") + ")";
                break;
            }
            case 11: line = "NewObject(env, " + any(regs) + ", " + any(regs) + ")"; break;
            case 12:
                if (branches < max_branches)
                {
                    ++branches;
                    defines = false;
                    static const char *const ops[] = {"==", "!=", "<", ">="};
                    std::string label = name + "_" + std::to_string(label_no++);
                    std::string rhs = pick(2) ? any(regs) : std::to_string(pick(3));
                    line = "branch-if " + any(regs) + " " + ops[pick(4)] + " " + rhs + ", L" + label;
                    pending.push_back(label);
                }
                else
                    line = "move " + any(regs);
                break;
            case 13:
                if (callable > 0 && calls < 2)
                {
                    ++calls;
                    line = "call h" + std::to_string(pick(callable)) + "(env, self, " + any(regs) + ", " + any(regs) +
                           ")";
                }
                else
                    line = "NewStringUTF(env, " + any(regs) + ")";
                break;
            default:
                if (pick(4) == 0)
                {
                    defines = false;
                    line = "ret " + any(regs);
                }
                else
                    line = "move " + any(regs);
                break;
            }
            if (defines)
            {
                lines.push_back(dst + " = " + line);
                regs.push_back(dst);
            }
            else
                lines.push_back(line);
        }
        while (!pending.empty())
        {
            lines.push_back("L" + pending.back() + ":");
            pending.pop_back();
        }
        lines.push_back("ret " + any(regs));

        std::ostringstream os;
        os << "    " << (exported ? "export " : "") << "fn " << name << "(env:env, self:object, x:int, s:string) {\n";
        for (const auto &l : lines)
            os << (l.back() == ':' ? "    " : "        ") << l << "\n";
        os << "    }\n";
        return os.str();
    }

    std::mt19937 rng_;
};

} // namespace

std::string random_loop_free_module(std::uint32_t seed)
{
    return Gen(seed).module(seed);
}

} // namespace oracle
