/// Per-site state. Two bits in packed storage; the value 3 is reserved and
/// never constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum SiteState {
    OpenVacant = 0,
    Occupied = 1,
    Closed = 2,
}

impl SiteState {
    #[inline]
    pub fn from_bits(bits: u8) -> Option<SiteState> {
        match bits {
            0 => Some(SiteState::OpenVacant),
            1 => Some(SiteState::Occupied),
            2 => Some(SiteState::Closed),
            _ => None,
        }
    }

    #[inline]
    pub fn to_bits(self) -> u8 {
        self as u8
    }

    /// Open means not closed; occupied sites are open.
    #[inline]
    pub fn is_open(self) -> bool {
        !matches!(self, SiteState::Closed)
    }

    #[inline]
    pub fn is_occupied(self) -> bool {
        matches!(self, SiteState::Occupied)
    }

    #[inline]
    pub fn is_closed(self) -> bool {
        matches!(self, SiteState::Closed)
    }
}
