//! Speech adapters stand where speech recognition and synthesis would sit on
//! a physical robot. The console adapter reads typed lines and prints replies.

use std::io::{self, BufRead, IsTerminal, Write};

use crate::gesture::{GestureName, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub hears: bool,
    pub speaks: bool,
}

pub trait SpeechAdapter {
    fn capabilities(&self) -> Capabilities;

    /// Next user utterance, or `None` once the user is gone.
    fn listen(&mut self) -> io::Result<Option<String>>;

    /// Returns once the text has been delivered.
    fn speak(&mut self, text: &str) -> io::Result<()>;

    fn gesture(&mut self, gesture: GestureName) -> io::Result<()>;

    /// Plays segments strictly in order.
    fn perform(&mut self, segments: &[Segment]) -> io::Result<()> {
        for segment in segments {
            match segment {
                Segment::Speech { text } => self.speak(text)?,
                Segment::Gesture { name } => self.gesture(*name)?,
            }
        }
        Ok(())
    }
}

/// Renders a gesture the way the console shows it, e.g. `[smile]`.
pub fn gesture_label(gesture: GestureName) -> String {
    format!("[{}]", gesture.as_str().to_lowercase())
}

/// Line-based adapter over any reader/writer pair.
pub struct ConsoleAdapter<R, W> {
    input: R,
    output: W,
    prompt: bool,
}

impl ConsoleAdapter<io::StdinLock<'static>, io::Stdout> {
    /// Prompts only when stdin is a terminal.
    pub fn stdio() -> Self {
        let interactive = io::stdin().is_terminal();
        Self::new(io::stdin().lock(), io::stdout(), interactive)
    }
}

impl<R: BufRead, W: Write> ConsoleAdapter<R, W> {
    /// With `prompt` set, a `You: ` marker is printed before each read.
    pub fn new(input: R, output: W, prompt: bool) -> Self {
        Self {
            input,
            output,
            prompt,
        }
    }

    pub fn into_output(self) -> W {
        self.output
    }
}

impl<R: BufRead, W: Write> SpeechAdapter for ConsoleAdapter<R, W> {
    fn capabilities(&self) -> Capabilities {
        Capabilities {
            hears: true,
            speaks: true,
        }
    }

    fn listen(&mut self) -> io::Result<Option<String>> {
        loop {
            if self.prompt {
                write!(self.output, "You: ")?;
                self.output.flush()?;
            }
            let mut line = String::new();
            if self.input.read_line(&mut line)? == 0 {
                return Ok(None);
            }
            let line = line.trim();
            if !line.is_empty() {
                return Ok(Some(line.to_owned()));
            }
        }
    }

    fn speak(&mut self, text: &str) -> io::Result<()> {
        writeln!(self.output, "Robot: {text}")?;
        self.output.flush()
    }

    fn gesture(&mut self, gesture: GestureName) -> io::Result<()> {
        writeln!(self.output, "{}", gesture_label(gesture))?;
        self.output.flush()
    }
}
