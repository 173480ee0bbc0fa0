#pragma once

#include "errors.hpp"
#include "projline.hpp"
#include "homeo.hpp"
#include "planes.hpp"
#include "groups.hpp"
#include "verify.hpp"
#include "plot.hpp"
