#pragma once

#include "turbox/common.hpp"
#include "turbox/model.hpp"
#include "turbox/superop.hpp"
#include "turbox/steady.hpp"
#include "turbox/validate.hpp"
#include "turbox/tur.hpp"
#include "turbox/fcs.hpp"
#include "turbox/zoo.hpp"
#include "turbox/family.hpp"
#include "turbox/optimize.hpp"
#include "turbox/io.hpp"
