#pragma once

#include "dwpf/error.hpp"
#include "dwpf/numerics.hpp"
#include "dwpf/permutations.hpp"
#include "dwpf/params.hpp"
#include "dwpf/models.hpp"
#include "dwpf/oracle.hpp"
#include "dwpf/closed_forms.hpp"
#include "dwpf/functional.hpp"
